//! Versioned JSON bundles for fitted artifacts. A bundle is
//! `{"format": ..., "version": ..., "body": ...}`; loading checks both tags
//! before touching the body.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tabsyn_core::baselines::{Classifier, Params};
use tabsyn_core::gan::{EpochLoss, GanModel, TrainConfig};
use tabsyn_core::mode_norm::RowEncoder;

use crate::{CliError, CliResult};

pub const VERSION: u32 = 1;

pub trait Artifact: Serialize + DeserializeOwned {
    const FORMAT: &'static str;
}

/// Fitted mode models and the row layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderBundle {
    pub encoder: RowEncoder,
}

impl Artifact for EncoderBundle {
    const FORMAT: &'static str = "tabsyn-encoder";
}

/// Trained networks with their encoder, training counts, settings and loss
/// history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanBundle {
    pub config: TrainConfig,
    pub model: GanModel,
    pub history: Vec<EpochLoss>,
}

impl Artifact for GanBundle {
    const FORMAT: &'static str = "tabsyn-gan";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierBundle {
    pub label: String,
    pub params: Params,
    pub seed: u64,
    pub classifier: Classifier,
}

impl Artifact for ClassifierBundle {
    const FORMAT: &'static str = "tabsyn-classifier";
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    format: &'a str,
    version: u32,
    body: &'a T,
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
}

#[derive(Deserialize)]
struct Body<T> {
    body: T,
}

pub fn to_json<T: Artifact>(artifact: &T) -> String {
    let env = Envelope {
        format: T::FORMAT,
        version: VERSION,
        body: artifact,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("artifacts serialize");
    s.push('\n');
    s
}

pub fn from_json<T: Artifact>(text: &str) -> CliResult<T> {
    let bad = |e: serde_json::Error| CliError::Data(format!("malformed {} bundle: {e}", T::FORMAT));
    let header: Header = serde_json::from_str(text).map_err(bad)?;
    if header.format != T::FORMAT {
        return Err(CliError::Data(format!(
            "expected a {} bundle, found {}",
            T::FORMAT,
            header.format
        )));
    }
    if header.version != VERSION {
        return Err(CliError::Data(format!(
            "unsupported {} bundle version {} (this build reads {VERSION})",
            T::FORMAT,
            header.version
        )));
    }
    Ok(serde_json::from_str::<Body<T>>(text).map_err(bad)?.body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tabsyn_core::demo;
    use tabsyn_core::mode_norm::VgmConfig;

    #[test]
    fn encoder_round_trip_and_tag_checks() {
        let t = demo::blobs(60, 1);
        let b = EncoderBundle {
            encoder: RowEncoder::fit(&t, &VgmConfig::default(), 3).unwrap(),
        };
        let text = to_json(&b);
        assert_eq!(from_json::<EncoderBundle>(&text).unwrap(), b);
        assert!(from_json::<GanBundle>(&text).is_err());
        let old = text.replace("\"version\": 1", "\"version\": 0");
        assert!(from_json::<EncoderBundle>(&old).is_err());
    }
}
