use crate::error::{Error, Result};
use crate::models::ControlSignal;

/// Fixed-step time nodes on [0, t_end] that contain every control breakpoint.
///
/// Each control interval is cut into the fewest equal steps not exceeding
/// `dt`, so no step straddles a breakpoint and the control is constant on
/// every step.
#[derive(Clone, Debug)]
pub struct TimeGrid {
    times: Vec<f64>,
    interval: Vec<usize>,
}

impl TimeGrid {
    pub fn new(control: &ControlSignal, t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        if !(t_end > 0.0) || t_end > control.horizon() * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "end time {t_end} outside (0, {}]",
                control.horizon()
            )));
        }
        if t_end / dt > 5e7 {
            return Err(Error::solver("time grid", format!("step {dt} underflows for t_end {t_end}")));
        }
        let bps = control.breakpoints();
        let mut times = vec![0.0];
        let mut interval = Vec::new();
        for k in 0..control.intervals() {
            let a = bps[k];
            if a >= t_end {
                break;
            }
            let b = bps[k + 1].min(t_end);
            let len = b - a;
            let n = ((len / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            for j in 1..=n {
                times.push(if j == n { b } else { a + len * j as f64 / n as f64 });
                interval.push(k);
            }
        }
        Ok(TimeGrid { times, interval })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn steps(&self) -> usize {
        self.interval.len()
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Control interval in force on step k (from times[k] to times[k + 1]).
    pub fn interval_of_step(&self, k: usize) -> usize {
        self.interval[k]
    }

    /// The step whose closed-open span contains t; the final node maps to the last step.
    pub fn step_containing(&self, t: f64) -> usize {
        let idx = self.times.partition_point(|&s| s <= t);
        idx.saturating_sub(1).min(self.steps() - 1)
    }

    /// Index of the node equal to t, if any.
    pub fn node_index(&self, t: f64) -> Option<usize> {
        let k = self.times.partition_point(|&s| s < t);
        (k < self.times.len() && self.times[k] == t).then_some(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakpoints_are_nodes_and_steps_bounded() {
        let c = ControlSignal::new(vec![0.0, 0.3, 0.35, 1.0], vec![vec![0.0]; 3]).unwrap();
        let g = TimeGrid::new(&c, 1.0, 0.1).unwrap();
        let t = g.times();
        assert!(g.node_index(0.3).is_some());
        assert!(g.node_index(0.35).is_some());
        assert_eq!(*t.last().unwrap(), 1.0);
        for w in t.windows(2) {
            assert!(w[1] > w[0] && w[1] - w[0] <= 0.1 + 1e-15);
        }
        assert_eq!(g.interval_of_step(g.step_containing(0.32)), 1);
        assert_eq!(g.step_containing(1.0), g.steps() - 1);
    }

    #[test]
    fn truncated_end() {
        let c = ControlSignal::uniform(1.0, &[1.0, 2.0]).unwrap();
        let g = TimeGrid::new(&c, 0.4, 0.01).unwrap();
        assert_eq!(g.steps(), 40);
        assert!(TimeGrid::new(&c, 1.5, 0.01).is_err());
    }
}
