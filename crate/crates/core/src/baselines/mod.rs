//! The five comparison classifiers (decision tree, random forest, gradient
//! boosting, SVM, dense network) and k-fold grid search.
//!
//! Every classifier is binary: the label column must have exactly two
//! categories and predictions are category indices of that column.

mod boosting;
mod design;
mod forest;
mod grid;
mod nn;
mod svm;
mod tree;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use boosting::{fit_boosting, BoostParams, Boosted};
pub use design::{Feature, FeatureMap, Scaler};
pub use forest::{fit_forest, Forest, ForestParams};
pub use grid::{grid_search, CellResult, GridReport, HyperGrid};
pub use nn::{fit_nn, NnModel, NnParams};
pub use svm::{fit_svm, Kernel, Svm, SvmParams};
pub use tree::{fit_tree, Node, Split, Tree, TreeParams};

use crate::table::DataTable;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    #[serde(rename = "dt")]
    DecisionTree,
    #[serde(rename = "rf")]
    RandomForest,
    #[serde(rename = "gb")]
    GradientBoosting,
    Svm,
    #[serde(rename = "nn")]
    NeuralNet,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::DecisionTree,
        ClassifierKind::RandomForest,
        ClassifierKind::GradientBoosting,
        ClassifierKind::Svm,
        ClassifierKind::NeuralNet,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ClassifierKind::DecisionTree => "DT",
            ClassifierKind::RandomForest => "RF",
            ClassifierKind::GradientBoosting => "GB",
            ClassifierKind::Svm => "SVM",
            ClassifierKind::NeuralNet => "NN",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.short_name().eq_ignore_ascii_case(name))
    }

    /// The tuned hyperparameters this toolkit uses by default.
    pub fn default_params(self) -> Params {
        match self {
            ClassifierKind::DecisionTree => Params::DecisionTree(TreeParams {
                max_depth: Some(10),
                min_samples_leaf: 2,
                min_samples_split: 5,
            }),
            ClassifierKind::RandomForest => Params::RandomForest(ForestParams::default()),
            ClassifierKind::GradientBoosting => Params::GradientBoosting(BoostParams::default()),
            ClassifierKind::Svm => Params::Svm(SvmParams::default()),
            ClassifierKind::NeuralNet => Params::NeuralNet(NnParams::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Params {
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
    GradientBoosting(BoostParams),
    Svm(SvmParams),
    NeuralNet(NnParams),
}

impl Params {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            Params::DecisionTree(_) => ClassifierKind::DecisionTree,
            Params::RandomForest(_) => ClassifierKind::RandomForest,
            Params::GradientBoosting(_) => ClassifierKind::GradientBoosting,
            Params::Svm(_) => ClassifierKind::Svm,
            Params::NeuralNet(_) => ClassifierKind::NeuralNet,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    DecisionTree(Tree),
    RandomForest(Forest),
    GradientBoosting(Boosted),
    Svm(Svm),
    NeuralNet(NnModel),
}

/// A fitted classifier bound to the schema it was trained on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classifier {
    pub features: FeatureMap,
    pub model: Model,
}

impl Classifier {
    pub fn kind(&self) -> ClassifierKind {
        match self.model {
            Model::DecisionTree(_) => ClassifierKind::DecisionTree,
            Model::RandomForest(_) => ClassifierKind::RandomForest,
            Model::GradientBoosting(_) => ClassifierKind::GradientBoosting,
            Model::Svm(_) => ClassifierKind::Svm,
            Model::NeuralNet(_) => ClassifierKind::NeuralNet,
        }
    }

    fn proba_row(&self, x: &[f64]) -> Result<f64> {
        Ok(match &self.model {
            Model::DecisionTree(t) => t.value(x),
            Model::RandomForest(f) => f.vote_fraction(x),
            Model::GradientBoosting(b) => b.probability(x),
            Model::Svm(s) => crate::gan::sigmoid(s.decision(x)),
            Model::NeuralNet(n) => n.probability(x)?,
        })
    }

    fn predict_row(&self, x: &[f64]) -> Result<usize> {
        Ok(match &self.model {
            Model::RandomForest(f) => f.predict(x),
            Model::Svm(s) => s.predict(x),
            _ => usize::from(self.proba_row(x)? > 0.5),
        })
    }

    /// Predicted label category index per row.
    pub fn predict(&self, table: &DataTable) -> Result<Vec<usize>> {
        self.features
            .matrix(table)?
            .iter()
            .map(|x| self.predict_row(x))
            .collect()
    }

    /// Score in `[0, 1]` for the label's second category (index 1). For the
    /// SVM this is the logistic of the decision value, uncalibrated.
    pub fn predict_proba(&self, table: &DataTable) -> Result<Vec<f64>> {
        self.features
            .matrix(table)?
            .iter()
            .map(|x| self.proba_row(x))
            .collect()
    }
}

/// Fits the classifier described by `params` on `table`, predicting `label`.
pub fn fit(table: &DataTable, label: &str, params: &Params, seed: u64) -> Result<Classifier> {
    let features = FeatureMap::new(table.schema(), label)?;
    let (x, y) = features.design(table)?;
    let model = match params {
        Params::DecisionTree(p) => Model::DecisionTree(fit_tree(&x, &y, *p)?),
        Params::RandomForest(p) => Model::RandomForest(fit_forest(&x, &y, p, seed)?),
        Params::GradientBoosting(p) => Model::GradientBoosting(fit_boosting(&x, &y, p)?),
        Params::Svm(p) => Model::Svm(fit_svm(&x, &y, p)?),
        Params::NeuralNet(p) => {
            let continuous: Vec<bool> = features
                .features()
                .iter()
                .map(|f| matches!(f, Feature::Continuous(_)))
                .collect();
            Model::NeuralNet(fit_nn(&x, &y, &continuous, p, seed)?)
        }
    };
    Ok(Classifier { features, model })
}

pub fn train_decision_tree(table: &DataTable, label: &str, params: TreeParams) -> Result<Classifier> {
    fit(table, label, &Params::DecisionTree(params), 0)
}

pub fn train_random_forest(table: &DataTable, label: &str, params: ForestParams, seed: u64) -> Result<Classifier> {
    fit(table, label, &Params::RandomForest(params), seed)
}

pub fn train_gradient_boosting(table: &DataTable, label: &str, params: BoostParams) -> Result<Classifier> {
    fit(table, label, &Params::GradientBoosting(params), 0)
}

pub fn train_svm(table: &DataTable, label: &str, params: SvmParams) -> Result<Classifier> {
    fit(table, label, &Params::Svm(params), 0)
}

pub fn train_nn_classifier(table: &DataTable, label: &str, params: NnParams, seed: u64) -> Result<Classifier> {
    fit(table, label, &Params::NeuralNet(params), seed)
}

/// Fraction of positions where `pred` and `truth` agree.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}
