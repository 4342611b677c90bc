use std::fmt::Write as _;

/// Header of the trace CSV.
pub const TRACE_HEADER: &str = "generation,cumulative_cost,best_objective_expensive,best_auc_expensive,best_objective_cheap,adjust_event";

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSample {
    pub generation: u32,
    pub cumulative_cost: f64,
    /// Best-ever expensive-task objective.
    pub best_objective: f64,
    /// Training AUC of the best-ever expensive-task solution.
    pub best_auc: f64,
    /// Best cheap-task objective in the current population, if any.
    pub best_objective_cheap: Option<f64>,
    pub adjust_event: bool,
}

/// Convergence samples with strictly increasing cumulative cost.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTrace {
    stride: u32,
    samples: Vec<TraceSample>,
    pending_adjust: bool,
}

impl ConvergenceTrace {
    pub fn new(stride: u32) -> Self {
        Self {
            stride: stride.max(1),
            samples: Vec::new(),
            pending_adjust: false,
        }
    }

    /// Keeps every `stride`-th generation plus the final one. Samples that do
    /// not advance the cost are dropped; an adjustment in a skipped generation
    /// is flagged on the next kept sample.
    pub fn offer(&mut self, mut sample: TraceSample, is_final: bool) {
        sample.adjust_event |= self.pending_adjust;
        let due = sample.generation % self.stride == 0 || is_final;
        let advances = self
            .samples
            .last()
            .map_or(true, |last| sample.cumulative_cost > last.cumulative_cost);
        if due && advances {
            self.pending_adjust = false;
            self.samples.push(sample);
        } else {
            self.pending_adjust = sample.adjust_event;
        }
    }

    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn last(&self) -> Option<&TraceSample> {
        self.samples.last()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Cost strictly increasing and best objective non-increasing.
    pub fn is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| {
            w[1].cumulative_cost > w[0].cumulative_cost && w[1].best_objective <= w[0].best_objective
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.samples.len() + 1));
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for s in &self.samples {
            let cheap = s.best_objective_cheap.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.generation,
                s.cumulative_cost,
                s.best_objective,
                s.best_auc,
                cheap,
                u8::from(s.adjust_event)
            );
        }
        out
    }
}
