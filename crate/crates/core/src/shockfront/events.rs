use std::collections::BTreeSet;

use serde::Serialize;

use super::tracker::SolutionField;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum EventKind {
    /// Gradient blow-up on the characteristic from `y`; starts `shock`.
    Formation { shock: usize, y: f64, generic: bool },
    /// Shocks meeting at a point. `output` is `None` for a contact at the
    /// terminal time that the run did not continue past.
    Merge { inputs: Vec<usize>, output: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
    pub kind: EventKind,
}

impl Event {
    pub fn formation(t: f64, x: f64, shock: usize) -> Self {
        Event {
            t,
            x,
            kind: EventKind::Formation {
                shock,
                y: f64::NAN,
                generic: true,
            },
        }
    }

    pub fn merge(t: f64, x: f64, inputs: &[usize], output: Option<usize>) -> Self {
        Event {
            t,
            x,
            kind: EventKind::Merge {
                inputs: inputs.to_vec(),
                output,
            },
        }
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            EventKind::Formation { .. } => "formation",
            EventKind::Merge { .. } => "merge",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularPoint {
    pub t: f64,
    pub x: f64,
    /// Blow-up characteristics joining at the point.
    pub m: usize,
    /// Previously formed shocks merging at the point.
    pub n: usize,
    pub terminal: bool,
    pub index: i64,
    /// Positions of the member events in the event list.
    pub events: Vec<usize>,
}

/// N(P): n − 2 or m + n − 1 inside (0, T), n − 1 or m + n at T.
pub fn singularity_index(m: usize, n: usize, terminal: bool) -> i64 {
    let (m, n) = (m as i64, n as i64);
    match (terminal, m) {
        (false, 0) => n - 2,
        (false, _) => m + n - 1,
        (true, 0) => n - 1,
        (true, _) => m + n,
    }
}

/// Groups events by single linkage in max(|Δt|, |Δx|) < eps and assigns
/// each group its counts and index. Groups with an event within eps of
/// `horizon` are terminal.
pub fn classify_events(events: &[Event], horizon: f64, eps: f64) -> Vec<SingularPoint> {
    let n = events.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&events[i], &events[j]);
            if (a.t - b.t).abs().max((a.x - b.x).abs()) < eps {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
        .into_iter()
        .map(|members| {
            let mut m = 0;
            let mut created = BTreeSet::new();
            let mut inputs = BTreeSet::new();
            for &i in &members {
                match &events[i].kind {
                    EventKind::Formation { shock, .. } => {
                        m += 1;
                        created.insert(*shock);
                    }
                    EventKind::Merge { inputs: ins, output } => {
                        inputs.extend(ins.iter().copied());
                        if let Some(o) = output {
                            created.insert(*o);
                        }
                    }
                }
            }
            let n = inputs.difference(&created).count();
            let terminal = members.iter().any(|&i| (horizon - events[i].t).abs() < eps);
            let k = members.len() as f64;
            SingularPoint {
                t: members.iter().map(|&i| events[i].t).sum::<f64>() / k,
                x: members.iter().map(|&i| events[i].x).sum::<f64>() / k,
                m,
                n,
                terminal,
                index: singularity_index(m, n, terminal),
                events: members,
            }
        })
        .collect()
}

pub fn classify_singular_points(sol: &SolutionField, cluster_eps: f64) -> Vec<SingularPoint> {
    classify_events(&sol.events, sol.horizon(), cluster_eps)
}

/// N(ū): the sum of indices over the classified singular points.
pub fn total_index(sol: &SolutionField) -> i64 {
    sol.singular_points.iter().map(|p| p.index).sum()
}
