use super::state::MHDState;
use crate::error::Result;

/// Receiver of states emitted by [`super::simulate`].
pub trait StateSink {
    /// Steps between observations; `None` follows the config's
    /// `output_cadence`.
    fn cadence(&self) -> Option<usize> {
        None
    }

    /// Called at step 0, at every cadence multiple, and at the final step.
    fn observe(&mut self, step: usize, state: &MHDState) -> Result<()>;

    /// Called once with the last finite state, on success and on blow-up.
    fn finish(&mut self, _last: &MHDState) -> Result<()> {
        Ok(())
    }
}

/// Keeps every observed state in memory.
#[derive(Clone, Debug, Default)]
pub struct TrajectoryRecorder {
    cadence: Option<usize>,
    pub states: Vec<MHDState>,
}

impl TrajectoryRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn every(cadence: usize) -> Self {
        Self {
            cadence: Some(cadence.max(1)),
            states: Vec::new(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn into_states(self) -> Vec<MHDState> {
        self.states
    }
}

impl StateSink for TrajectoryRecorder {
    fn cadence(&self) -> Option<usize> {
        self.cadence
    }

    fn observe(&mut self, _step: usize, state: &MHDState) -> Result<()> {
        self.states.push(state.clone());
        Ok(())
    }
}
