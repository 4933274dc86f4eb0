use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{accuracy, fit, BoostParams, ClassifierKind, ForestParams, Kernel, NnParams, Params, SvmParams, TreeParams};
use crate::random::derive_seed;
use crate::table::{kfold_indices, DataTable};
use crate::{Error, Result};

/// Candidate values per hyperparameter axis. Cells are enumerated with the
/// first axis varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HyperGrid {
    DecisionTree {
        max_depth: Vec<Option<usize>>,
        min_samples_leaf: Vec<usize>,
        min_samples_split: Vec<usize>,
    },
    RandomForest {
        n_estimators: Vec<usize>,
        max_depth: Vec<Option<usize>>,
        min_samples_leaf: Vec<usize>,
        min_samples_split: Vec<usize>,
    },
    GradientBoosting {
        n_stages: Vec<usize>,
        learning_rate: Vec<f64>,
        max_depth: Vec<usize>,
    },
    Svm {
        kernel: Vec<Kernel>,
        c: Vec<f64>,
        gamma: Vec<f64>,
    },
    NeuralNet {
        epochs: Vec<usize>,
        batch_size: Vec<usize>,
        hidden_width: Vec<usize>,
        learning_rate: Vec<f64>,
        dropout: Vec<f64>,
    },
}

/// Cartesian product of axis lengths, first axis slowest.
fn product(lens: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &len in lens {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..len).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect();
    }
    out
}

impl HyperGrid {
    /// The published tuning grid for each kind. Decision trees reuse the
    /// forest's tree axes and boosting gets a small grid around its
    /// defaults, since neither has a published grid.
    pub fn standard(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::DecisionTree => HyperGrid::DecisionTree {
                max_depth: vec![Some(5), Some(10), Some(15), Some(20)],
                min_samples_leaf: vec![1, 2, 3, 5],
                min_samples_split: vec![1, 3, 5, 10, 15],
            },
            ClassifierKind::RandomForest => HyperGrid::RandomForest {
                n_estimators: vec![50, 100, 200, 600],
                max_depth: vec![Some(5), Some(10), Some(15), Some(20)],
                min_samples_leaf: vec![1, 2, 3, 5],
                min_samples_split: vec![1, 3, 5, 10, 15],
            },
            ClassifierKind::GradientBoosting => HyperGrid::GradientBoosting {
                n_stages: vec![50, 100, 200],
                learning_rate: vec![0.05, 0.1, 0.2],
                max_depth: vec![2, 3, 4],
            },
            ClassifierKind::Svm => HyperGrid::Svm {
                kernel: vec![Kernel::Rbf, Kernel::Linear, Kernel::Polynomial],
                c: vec![0.1, 1.0, 10.0],
                gamma: vec![0.1, 1.0, 10.0],
            },
            ClassifierKind::NeuralNet => HyperGrid::NeuralNet {
                epochs: vec![50, 100, 200, 300],
                batch_size: vec![2, 8, 16, 32, 64],
                hidden_width: vec![5, 10, 20],
                learning_rate: vec![1e-1, 1e-2, 1e-3, 1e-4],
                dropout: vec![0.0, 0.1, 0.2],
            },
        }
    }

    /// Grid holding only `params`.
    pub fn single(params: &Params) -> Self {
        match *params {
            Params::DecisionTree(p) => HyperGrid::DecisionTree {
                max_depth: vec![p.max_depth],
                min_samples_leaf: vec![p.min_samples_leaf],
                min_samples_split: vec![p.min_samples_split],
            },
            Params::RandomForest(p) => HyperGrid::RandomForest {
                n_estimators: vec![p.n_estimators],
                max_depth: vec![p.tree.max_depth],
                min_samples_leaf: vec![p.tree.min_samples_leaf],
                min_samples_split: vec![p.tree.min_samples_split],
            },
            Params::GradientBoosting(p) => HyperGrid::GradientBoosting {
                n_stages: vec![p.n_stages],
                learning_rate: vec![p.learning_rate],
                max_depth: vec![p.max_depth],
            },
            Params::Svm(p) => HyperGrid::Svm {
                kernel: vec![p.kernel],
                c: vec![p.c],
                gamma: vec![p.gamma],
            },
            Params::NeuralNet(p) => HyperGrid::NeuralNet {
                epochs: vec![p.epochs],
                batch_size: vec![p.batch_size],
                hidden_width: vec![p.hidden_width],
                learning_rate: vec![p.learning_rate],
                dropout: vec![p.dropout],
            },
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            HyperGrid::DecisionTree { .. } => ClassifierKind::DecisionTree,
            HyperGrid::RandomForest { .. } => ClassifierKind::RandomForest,
            HyperGrid::GradientBoosting { .. } => ClassifierKind::GradientBoosting,
            HyperGrid::Svm { .. } => ClassifierKind::Svm,
            HyperGrid::NeuralNet { .. } => ClassifierKind::NeuralNet,
        }
    }

    pub fn axis_lengths(&self) -> Vec<usize> {
        match self {
            HyperGrid::DecisionTree {
                max_depth,
                min_samples_leaf,
                min_samples_split,
            } => vec![max_depth.len(), min_samples_leaf.len(), min_samples_split.len()],
            HyperGrid::RandomForest {
                n_estimators,
                max_depth,
                min_samples_leaf,
                min_samples_split,
            } => vec![
                n_estimators.len(),
                max_depth.len(),
                min_samples_leaf.len(),
                min_samples_split.len(),
            ],
            HyperGrid::GradientBoosting {
                n_stages,
                learning_rate,
                max_depth,
            } => vec![n_stages.len(), learning_rate.len(), max_depth.len()],
            HyperGrid::Svm { kernel, c, gamma } => vec![kernel.len(), c.len(), gamma.len()],
            HyperGrid::NeuralNet {
                epochs,
                batch_size,
                hidden_width,
                learning_rate,
                dropout,
            } => vec![
                epochs.len(),
                batch_size.len(),
                hidden_width.len(),
                learning_rate.len(),
                dropout.len(),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.axis_lengths().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis_lengths().contains(&0) {
            return Err(Error::invalid("every grid axis needs at least one value"));
        }
        Ok(())
    }

    /// Every cell as concrete parameters, in enumeration order.
    pub fn cells(&self) -> Vec<Params> {
        product(&self.axis_lengths())
            .into_iter()
            .map(|ix| match self {
                HyperGrid::DecisionTree {
                    max_depth,
                    min_samples_leaf,
                    min_samples_split,
                } => Params::DecisionTree(TreeParams {
                    max_depth: max_depth[ix[0]],
                    min_samples_leaf: min_samples_leaf[ix[1]],
                    min_samples_split: min_samples_split[ix[2]],
                }),
                HyperGrid::RandomForest {
                    n_estimators,
                    max_depth,
                    min_samples_leaf,
                    min_samples_split,
                } => Params::RandomForest(ForestParams {
                    n_estimators: n_estimators[ix[0]],
                    tree: TreeParams {
                        max_depth: max_depth[ix[1]],
                        min_samples_leaf: min_samples_leaf[ix[2]],
                        min_samples_split: min_samples_split[ix[3]],
                    },
                    ..ForestParams::default()
                }),
                HyperGrid::GradientBoosting {
                    n_stages,
                    learning_rate,
                    max_depth,
                } => Params::GradientBoosting(BoostParams {
                    n_stages: n_stages[ix[0]],
                    learning_rate: learning_rate[ix[1]],
                    max_depth: max_depth[ix[2]],
                }),
                HyperGrid::Svm { kernel, c, gamma } => Params::Svm(SvmParams {
                    kernel: kernel[ix[0]],
                    c: c[ix[1]],
                    gamma: gamma[ix[2]],
                    ..SvmParams::default()
                }),
                HyperGrid::NeuralNet {
                    epochs,
                    batch_size,
                    hidden_width,
                    learning_rate,
                    dropout,
                } => Params::NeuralNet(NnParams {
                    epochs: epochs[ix[0]],
                    batch_size: batch_size[ix[1]],
                    hidden_width: hidden_width[ix[2]],
                    learning_rate: learning_rate[ix[3]],
                    dropout: dropout[ix[4]],
                    ..NnParams::default()
                }),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub params: Params,
    pub fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub cells: Vec<CellResult>,
    /// Index of the winning cell (first maximum).
    pub best: usize,
}

impl GridReport {
    pub fn best_params(&self) -> &Params {
        &self.cells[self.best].params
    }

    pub fn best_accuracy(&self) -> f64 {
        self.cells[self.best].mean_accuracy
    }
}

/// Exhaustive sweep with k-fold cross-validated accuracy. Folds are shared
/// by all cells; cell `i` trains with seed `derive_seed(seed, i)`.
pub fn grid_search(
    grid: &HyperGrid,
    table: &DataTable,
    label: &str,
    k_folds: usize,
    seed: u64,
) -> Result<GridReport> {
    grid.validate()?;
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let folds = kfold_indices(table.len(), k_folds, derive_seed(seed, u64::MAX))?;
    let splits: Vec<(DataTable, DataTable)> = (0..k_folds)
        .map(|f| {
            let train: Vec<usize> = folds
                .iter()
                .enumerate()
                .filter(|(g, _)| *g != f)
                .flat_map(|(_, idx)| idx.iter().copied())
                .collect();
            (table.select(&train), table.select(&folds[f]))
        })
        .collect();
    let mut cells = Vec::with_capacity(grid.len());
    for (i, params) in grid.cells().into_iter().enumerate() {
        let cell_seed = derive_seed(seed, i as u64);
        let mut fold_accuracy = Vec::with_capacity(k_folds);
        for (f, (train, held)) in splits.iter().enumerate() {
            let clf = fit(train, label, &params, derive_seed(cell_seed, f as u64))?;
            let truth = held.categories_of(clf.features.label_column());
            fold_accuracy.push(accuracy(&clf.predict(held)?, &truth));
        }
        let mean_accuracy = fold_accuracy.iter().sum::<f64>() / k_folds as f64;
        cells.push(CellResult {
            params,
            fold_accuracy,
            mean_accuracy,
        });
    }
    let mut best = 0;
    for (i, c) in cells.iter().enumerate() {
        if c.mean_accuracy > cells[best].mean_accuracy {
            best = i;
        }
    }
    Ok(GridReport { cells, best })
}
