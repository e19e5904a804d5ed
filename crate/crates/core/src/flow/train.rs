//! Gradient training of flow parameters with adaptive moments and
//! validation-based early stopping.

use super::tape::{NodeId, Tape};
use super::{ConditionalFlow, FlowParams};
use crate::error::CoreError;
use crate::Result;
use rand_chacha::ChaCha20Rng;

/// Optimizer and stopping hyperparameters. Defaults follow the training
/// recipe used throughout: batch 100, learning rate 5e-4, weight decay
/// 1e-4, patience 20.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub patience: usize,
    pub max_epochs: usize,
    pub divergence_factor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 100,
            learning_rate: 5e-4,
            weight_decay: 1e-4,
            patience: 20,
            max_epochs: 300,
            divergence_factor: 10.0,
        }
    }
}

/// Which pass the loss builder is serving.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    /// Training epoch (1-based); builders may re-randomize inner points.
    Train { epoch: usize },
    /// Validation pass; builders must keep their randomization fixed.
    Validate,
}

/// One epoch of history.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct EpochReport {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

/// Validation-loss early stopping: training stops once `patience` epochs
/// pass without strict improvement.
#[derive(Clone, Debug)]
pub struct EarlyStop {
    best: f64,
    since: usize,
    patience: usize,
}

impl EarlyStop {
    pub fn new(patience: usize) -> Self {
        EarlyStop { best: f64::INFINITY, since: 0, patience }
    }

    /// Record a validation loss; returns true when it improved.
    pub fn observe(&mut self, val: f64) -> bool {
        if val < self.best {
            self.best = val;
            self.since = 0;
            true
        } else {
            self.since += 1;
            false
        }
    }

    pub fn should_stop(&self) -> bool {
        self.since >= self.patience
    }

    pub fn best(&self) -> f64 {
        self.best
    }
}

/// Result of a training run.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub history: Vec<EpochReport>,
    pub best_val: f64,
    pub stopped_early: bool,
}

/// Train `params` in place. `batch_loss` builds the scalar loss node for a
/// slice of item indices: indices below `n_train` refer to training items,
/// and validation passes receive indices into the validation set. On
/// return `params` holds the weights achieving the best validation loss.
pub fn train_flow<L>(
    flow: &ConditionalFlow,
    params: &mut FlowParams,
    n_train: usize,
    n_val: usize,
    cfg: &TrainConfig,
    rng: &mut ChaCha20Rng,
    mut batch_loss: L,
) -> Result<TrainOutcome>
where
    L: FnMut(&mut Tape, &ConditionalFlow, &[NodeId], &[usize], Phase) -> NodeId,
{
    if n_train == 0 {
        return Err(CoreError::EstimatorFailure("training set is empty".into()));
    }
    let mut adam = Adam::new(params.len(), cfg.learning_rate, cfg.weight_decay);
    let mut stopper = EarlyStop::new(cfg.patience);
    let mut best_params = params.data.clone();
    let mut history = Vec::new();
    let mut initial_train: Option<f64> = None;
    let mut indices: Vec<usize> = (0..n_train).collect();
    let mut stopped_early = false;

    for epoch in 1..=cfg.max_epochs {
        shuffle(&mut indices, rng);
        let mut train_acc = 0.0;
        let mut train_n = 0usize;
        for chunk in indices.chunks(cfg.batch_size) {
            let mut tape = Tape::new();
            let bound = flow.bind(&mut tape, params);
            let loss = batch_loss(&mut tape, flow, &bound, chunk, Phase::Train { epoch });
            let loss_val = tape.value(loss).item();
            if !loss_val.is_finite() {
                return Err(CoreError::NonFinite(format!("training loss at epoch {epoch}")));
            }
            train_acc += loss_val * chunk.len() as f64;
            train_n += chunk.len();
            let grads = tape.backward(loss);
            adam.step(params, &bound, &grads);
        }
        let train_loss = train_acc / train_n as f64;
        let initial = *initial_train.get_or_insert(train_loss);
        let guard = cfg.divergence_factor * initial.abs().max(1.0);
        if train_loss > initial + guard {
            return Err(CoreError::TrainingDiverged { epoch, loss: train_loss, initial });
        }

        let val_loss = if n_val == 0 {
            train_loss
        } else {
            let mut acc = 0.0;
            for chunk in (0..n_val).collect::<Vec<_>>().chunks(cfg.batch_size) {
                let mut tape = Tape::new();
                let bound = flow.bind(&mut tape, params);
                let loss = batch_loss(&mut tape, flow, &bound, chunk, Phase::Validate);
                acc += tape.value(loss).item() * chunk.len() as f64;
            }
            acc / n_val as f64
        };
        history.push(EpochReport { epoch, train_loss, val_loss });
        if stopper.observe(val_loss) {
            best_params.copy_from_slice(&params.data);
        }
        if stopper.should_stop() {
            stopped_early = true;
            break;
        }
    }
    params.data.copy_from_slice(&best_params);
    Ok(TrainOutcome { history, best_val: stopper.best(), stopped_early })
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
    lr: f64,
    wd: f64,
}

impl Adam {
    fn new(dim: usize, lr: f64, wd: f64) -> Self {
        Adam { m: vec![0.0; dim], v: vec![0.0; dim], t: 0, lr, wd }
    }

    fn step(
        &mut self,
        params: &mut FlowParams,
        bound: &[NodeId],
        grads: &super::tape::Gradients,
    ) {
        const B1: f64 = 0.9;
        const B2: f64 = 0.999;
        const EPS: f64 = 1e-8;
        self.t += 1;
        let c1 = 1.0 - B1.powi(self.t as i32);
        let c2 = 1.0 - B2.powi(self.t as i32);
        for (entry, &node) in params.entries.iter().zip(bound) {
            let Some(g) = grads.get(node) else { continue };
            let off = entry.offset;
            for (k, &gv) in g.data.iter().enumerate() {
                let i = off + k;
                let grad = gv + self.wd * params.data[i];
                self.m[i] = B1 * self.m[i] + (1.0 - B1) * grad;
                self.v[i] = B2 * self.v[i] + (1.0 - B2) * grad * grad;
                let mhat = self.m[i] / c1;
                let vhat = self.v[i] / c2;
                params.data[i] -= self.lr * mhat / (vhat.sqrt() + EPS);
            }
        }
    }
}

fn shuffle(indices: &mut [usize], rng: &mut ChaCha20Rng) {
    use rand::Rng;
    for i in (1..indices.len()).rev() {
        let j = (rng.random::<u64>() % (i as u64 + 1)) as usize;
        indices.swap(i, j);
    }
}
