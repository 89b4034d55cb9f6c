use serde::Serialize;

use super::events::{classify_events, Event, EventKind, SingularPoint};
use super::slice::{FanSlice, Trace};
use crate::characteristics::{blowup_map_of_fan, default_y_grid, BlowupMap, Fan};
use crate::error::{Error, Result};
use crate::models::{FluxModel, ProblemSpec};

/// Rankine-Hugoniot speed (f(uL) − f(uR))/(uL − uR), with the limit f′ for
/// nearly equal states.
pub fn rh_speed(flux: &FluxModel, u_left: f64, u_right: f64) -> f64 {
    if (u_left - u_right).abs() < 1e-12 {
        flux.d1(0.5 * (u_left + u_right))
    } else {
        (flux.eval(u_left) - flux.eval(u_right)) / (u_left - u_right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShockSample {
    pub t: f64,
    pub x: f64,
    /// Generators of the left and right faces.
    pub y_left: f64,
    pub y_right: f64,
    pub u_left: f64,
    pub u_right: f64,
    pub ux_left: f64,
    pub ux_right: f64,
    pub speed: f64,
}

impl ShockSample {
    pub fn strength(&self) -> f64 {
        self.u_left - self.u_right
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Origin {
    Formation { y: f64, generic: bool },
    Merge { inputs: Vec<usize> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DeathCause {
    MergedInto(usize),
    ReachedHorizon,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Death {
    pub t: f64,
    pub cause: DeathCause,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShockCurve {
    pub id: usize,
    pub birth_t: f64,
    pub birth_x: f64,
    pub origin: Origin,
    pub samples: Vec<ShockSample>,
    pub death: Option<Death>,
}

impl ShockCurve {
    pub fn end_t(&self) -> f64 {
        self.samples.last().map_or(self.birth_t, |s| s.t)
    }

    /// Alive on [birth, death), or on [birth, T] if it reaches the horizon.
    pub fn alive_at(&self, t: f64) -> bool {
        match self.death {
            Some(Death { t: d, cause: DeathCause::MergedInto(_) }) => t >= self.birth_t && t < d,
            _ => t >= self.birth_t && t <= self.end_t(),
        }
    }

    /// Position at t by cubic Hermite interpolation of (x, speed) between samples.
    pub fn position_at(&self, t: f64) -> Option<f64> {
        let s = &self.samples;
        if s.is_empty() || t < s[0].t || t > s[s.len() - 1].t {
            return None;
        }
        let k = s.partition_point(|p| p.t <= t);
        if k == 0 {
            return Some(s[0].x);
        }
        let a = &s[k - 1];
        if k == s.len() || a.t == t {
            return Some(a.x);
        }
        let b = &s[k];
        let h = b.t - a.t;
        let r = (t - a.t) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * r) * (1.0 - r) * (1.0 - r),
            r * (1.0 - r) * (1.0 - r),
            r * r * (3.0 - 2.0 * r),
            r * r * (r - 1.0),
        );
        Some(h00 * a.x + h10 * h * a.speed + h01 * b.x + h11 * h * b.speed)
    }

    /// The last sample at or before t.
    pub fn sample_before(&self, t: f64) -> Option<&ShockSample> {
        let k = self.samples.partition_point(|p| p.t <= t);
        (k > 0).then(|| &self.samples[k - 1])
    }
}

/// The assembled entropy solution on [0, T].
#[derive(Clone, Debug)]
pub struct SolutionField {
    pub spec: ProblemSpec,
    pub fan: Fan,
    pub blowup: BlowupMap,
    pub shocks: Vec<ShockCurve>,
    pub events: Vec<Event>,
    pub singular_points: Vec<SingularPoint>,
    pub total_index: i64,
    pub cluster_eps: f64,
}

impl SolutionField {
    pub fn horizon(&self) -> f64 {
        self.fan.dynamics().t_end()
    }

    pub fn shock(&self, id: usize) -> &ShockCurve {
        &self.shocks[id]
    }

    /// Re-clusters the events with a different tolerance.
    pub fn reclassify(&mut self, cluster_eps: f64) {
        self.cluster_eps = cluster_eps;
        self.singular_points = classify_events(&self.events, self.horizon(), cluster_eps);
        self.total_index = total_of(&self.singular_points);
    }

    /// Shocks alive at t with their positions, ordered by position.
    pub fn shocks_at(&self, t: f64) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self
            .shocks
            .iter()
            .filter(|s| s.alive_at(t))
            .filter_map(|s| s.position_at(t).map(|x| (s.id, x)))
            .collect();
        v.sort_by(|a, b| a.1.total_cmp(&b.1));
        v
    }
}

pub(crate) fn total_of(points: &[SingularPoint]) -> i64 {
    points.iter().map(|p| p.index).sum()
}

pub fn default_cluster_eps(spec: &ProblemSpec) -> f64 {
    1e-3 * spec.horizon.max(spec.window.1 - spec.window.0)
}

/// [`build_solution`] on the default grid and time step.
pub fn build_default(spec: &ProblemSpec) -> Result<SolutionField> {
    build_solution(spec, &default_y_grid(spec), spec.default_dt())
}

#[derive(Clone, Copy, Debug)]
struct Live {
    id: usize,
    x: f64,
    left: Trace,
    right: Trace,
    // outermost generators consumed so far
    low: f64,
    high: f64,
}

#[derive(Clone, Copy, Debug)]
struct Moved {
    x: f64,
    left: Trace,
    right: Trace,
}

struct Tracker<'a> {
    fan: &'a Fan,
    flux: &'a FluxModel,
    shocks: Vec<ShockCurve>,
    events: Vec<Event>,
    live: Vec<Live>,
    terminated: Vec<Option<(f64, usize)>>,
}

/// Integrates the fan, seeds shocks at the minima of the blow-up map and
/// evolves them by Rankine-Hugoniot, merging on contact.
pub fn build_solution(spec: &ProblemSpec, y_grid: &[f64], dt: f64) -> Result<SolutionField> {
    let fan = Fan::integrate(spec, y_grid, dt)?;
    build_on_fan(fan)
}

pub(crate) fn build_on_fan(mut fan: Fan) -> Result<SolutionField> {
    let spec = fan.spec().clone();
    let blowup = blowup_map_of_fan(&fan)?;
    let cluster_eps = default_cluster_eps(&spec);
    let (shocks, events, terminated) = {
        let mut tr = Tracker {
            fan: &fan,
            flux: &spec.flux,
            shocks: Vec::new(),
            events: Vec::new(),
            live: Vec::new(),
            terminated: vec![None; fan.len()],
        };
        tr.run(&blowup, cluster_eps)?;
        (tr.shocks, tr.events, tr.terminated)
    };
    for (traj, term) in fan.trajs.iter_mut().zip(terminated) {
        if let Some((t, id)) = term {
            traj.terminated_at = Some(t);
            traj.absorbed_by = Some(id);
        }
    }
    let horizon = fan.dynamics().t_end();
    let singular_points = classify_events(&events, horizon, cluster_eps);
    let total_index = total_of(&singular_points);
    Ok(SolutionField {
        spec,
        fan,
        blowup,
        shocks,
        events,
        singular_points,
        total_index,
        cluster_eps,
    })
}

impl<'a> Tracker<'a> {
    fn run(&mut self, blowup: &BlowupMap, contact_eps: f64) -> Result<()> {
        let times: Vec<f64> = self.fan.times().to_vec();
        let t_end = *times.last().unwrap();
        let mut seeds: Vec<_> = blowup.seeds.iter().filter(|s| s.in_horizon && s.tau <= t_end).copied().collect();
        seeds.sort_by(|a, b| a.tau.total_cmp(&b.tau));
        let mut next_seed = 0;
        let mut t = 0.0;
        for k in 0..times.len() - 1 {
            let t_node = times[k + 1];
            loop {
                while next_seed < seeds.len() && seeds[next_seed].tau <= t {
                    self.insert(&seeds[next_seed])?;
                    next_seed += 1;
                }
                let target = if next_seed < seeds.len() && seeds[next_seed].tau < t_node {
                    seeds[next_seed].tau
                } else {
                    t_node
                };
                if target - t <= 1e-14 * t_node.max(1.0) {
                    t = target;
                    if target == t_node {
                        break;
                    }
                    continue;
                }
                let moved = self.advance_all(t, target)?;
                if !self.crossing(&moved).is_empty() {
                    let (tm, moved) = self.locate_merge(t, target)?;
                    self.commit(t, tm, &moved);
                    self.merge(tm, &moved)?;
                    t = tm;
                    continue;
                }
                self.commit(t, target, &moved);
                t = target;
                if target == t_node {
                    break;
                }
            }
        }
        while next_seed < seeds.len() && seeds[next_seed].tau <= t_end {
            self.insert(&seeds[next_seed])?;
            next_seed += 1;
        }
        self.finish(t_end, contact_eps);
        Ok(())
    }

    fn insert(&mut self, seed: &crate::characteristics::Seed) -> Result<()> {
        if self.live.iter().any(|l| l.low < seed.y && seed.y < l.high) {
            return Ok(());
        }
        let slice = FanSlice::new(self.fan, seed.tau);
        let mut tr = slice.trace(seed.y);
        tr.xi = seed.x;
        let id = self.shocks.len();
        let speed = self.flux.d1(tr.u);
        self.shocks.push(ShockCurve {
            id,
            birth_t: seed.tau,
            birth_x: seed.x,
            origin: Origin::Formation {
                y: seed.y,
                generic: seed.generic,
            },
            samples: vec![sample(seed.tau, seed.x, &tr, &tr, speed)],
            death: None,
        });
        self.events.push(Event {
            t: seed.tau,
            x: seed.x,
            kind: EventKind::Formation {
                shock: id,
                y: seed.y,
                generic: seed.generic,
            },
        });
        let pos = self.live.partition_point(|l| l.x < seed.x);
        self.live.insert(
            pos,
            Live {
                id,
                x: seed.x,
                left: tr,
                right: tr,
                low: seed.y,
                high: seed.y,
            },
        );
        if let Some(i) = self.fan.ys.iter().position(|&y| y == seed.y) {
            self.terminated[i].get_or_insert((seed.tau, id));
        }
        Ok(())
    }

    /// One explicit midpoint step of every live shock from t0 to t1.
    fn advance_all(&self, t0: f64, t1: f64) -> Result<Vec<Moved>> {
        let h = t1 - t0;
        let half = FanSlice::new(self.fan, t0 + 0.5 * h);
        let end = FanSlice::new(self.fan, t1);
        self.live
            .iter()
            .map(|l| {
                let s1 = rh_speed(self.flux, l.left.u, l.right.u);
                let xh = l.x + 0.5 * h * s1;
                let lh = half.left_face(xh, l.left.y)?;
                let rh = half.right_face(xh, l.right.y)?;
                let s2 = rh_speed(self.flux, lh.u, rh.u);
                let x = l.x + h * s2;
                let left = end.left_face(x, lh.y)?;
                let right = end.right_face(x, rh.y)?;
                Ok(Moved { x, left, right })
            })
            .collect()
    }

    /// Indices i such that live shocks i and i + 1 have met.
    fn crossing(&self, moved: &[Moved]) -> Vec<usize> {
        (0..moved.len().saturating_sub(1))
            .filter(|&i| moved[i + 1].x <= moved[i].x || moved[i].right.y >= moved[i + 1].left.y)
            .collect()
    }

    /// Bisects the step for the first contact.
    fn locate_merge(&self, t0: f64, t1: f64) -> Result<(f64, Vec<Moved>)> {
        let (mut lo, mut hi) = (t0, t1);
        let mut at_hi = self.advance_all(t0, t1)?;
        while hi - lo > 1e-11 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            let m = self.advance_all(t0, mid)?;
            if self.crossing(&m).is_empty() {
                lo = mid;
            } else {
                hi = mid;
                at_hi = m;
            }
        }
        if hi - t0 <= 0.0 {
            return Err(Error::solver("merge location", format!("step underflow at t = {t0}")));
        }
        Ok((hi, at_hi))
    }

    fn commit(&mut self, t0: f64, t1: f64, moved: &[Moved]) {
        let ys = &self.fan.ys;
        for (l, m) in self.live.iter_mut().zip(moved) {
            if m.left.y < l.low {
                for (i, &y) in ys.iter().enumerate().filter(|(_, &y)| y > m.left.y && y <= l.low) {
                    let r = (l.low - y) / (l.low - m.left.y);
                    self.terminated[i].get_or_insert((t0 + r * (t1 - t0), l.id));
                }
                l.low = m.left.y;
            }
            if m.right.y > l.high {
                for (i, &y) in ys.iter().enumerate().filter(|(_, &y)| y < m.right.y && y >= l.high) {
                    let r = (y - l.high) / (m.right.y - l.high);
                    self.terminated[i].get_or_insert((t0 + r * (t1 - t0), l.id));
                }
                l.high = m.right.y;
            }
            l.x = m.x;
            l.left = m.left;
            l.right = m.right;
            let speed = rh_speed(self.flux, m.left.u, m.right.u);
            self.shocks[l.id].samples.push(sample(t1, m.x, &m.left, &m.right, speed));
        }
    }

    fn merge(&mut self, tm: f64, moved: &[Moved]) -> Result<()> {
        let hits = self.crossing(moved);
        // group runs of consecutive contacts
        let mut groups: Vec<(usize, usize)> = Vec::new();
        for i in hits {
            match groups.last_mut() {
                Some(g) if g.1 == i => g.1 = i + 1,
                _ => groups.push((i, i + 1)),
            }
        }
        let slice = FanSlice::new(self.fan, tm);
        for &(a, b) in groups.iter().rev() {
            let members: Vec<Live> = self.live[a..=b].to_vec();
            let x = members.iter().map(|l| l.x).sum::<f64>() / members.len() as f64;
            let first = &members[0];
            let last = &members[members.len() - 1];
            let left = slice.left_face(x, first.left.y)?;
            let right = slice.right_face(x, last.right.y)?;
            let id = self.shocks.len();
            let inputs: Vec<usize> = members.iter().map(|l| l.id).collect();
            for l in &members {
                self.shocks[l.id].death = Some(Death {
                    t: tm,
                    cause: DeathCause::MergedInto(id),
                });
            }
            // the middle fans between the merging shocks end here
            let (lo, hi) = (first.low.min(left.y), last.high.max(right.y));
            for (i, &y) in self.fan.ys.iter().enumerate() {
                if y > lo && y < hi {
                    self.terminated[i].get_or_insert((tm, id));
                }
            }
            let speed = rh_speed(self.flux, left.u, right.u);
            self.shocks.push(ShockCurve {
                id,
                birth_t: tm,
                birth_x: x,
                origin: Origin::Merge { inputs: inputs.clone() },
                samples: vec![sample(tm, x, &left, &right, speed)],
                death: None,
            });
            self.events.push(Event {
                t: tm,
                x,
                kind: EventKind::Merge {
                    inputs,
                    output: Some(id),
                },
            });
            self.live.splice(
                a..=b,
                [Live {
                    id,
                    x,
                    left,
                    right,
                    low: lo,
                    high: hi,
                }],
            );
        }
        Ok(())
    }

    /// Closes the run: neighbours closer than `eps` at T are recorded as a
    /// terminal contact, all survivors reach the horizon.
    fn finish(&mut self, t_end: f64, eps: f64) {
        let mut i = 0;
        while i + 1 < self.live.len() {
            let mut j = i;
            while j + 1 < self.live.len() && self.live[j + 1].x - self.live[j].x < eps {
                j += 1;
            }
            if j > i {
                let group = &self.live[i..=j];
                let x = group.iter().map(|l| l.x).sum::<f64>() / group.len() as f64;
                self.events.push(Event {
                    t: t_end,
                    x,
                    kind: EventKind::Merge {
                        inputs: group.iter().map(|l| l.id).collect(),
                        output: None,
                    },
                });
            }
            i = j + 1;
        }
        for l in &self.live {
            self.shocks[l.id].death = Some(Death {
                t: t_end,
                cause: DeathCause::ReachedHorizon,
            });
        }
        self.events.sort_by(|a, b| a.t.total_cmp(&b.t));
    }
}

fn sample(t: f64, x: f64, left: &Trace, right: &Trace, speed: f64) -> ShockSample {
    ShockSample {
        t,
        x,
        y_left: left.y,
        y_right: right.y,
        u_left: left.u,
        u_right: right.u,
        ux_left: left.ux(),
        ux_right: right.ux(),
        speed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Polynomial;

    #[test]
    fn rh_speed_examples() {
        let b = FluxModel::burgers();
        assert_eq!(rh_speed(&b, 2.0, -2.0), 0.0);
        assert!((rh_speed(&b, 3.0, 1.0) - 2.0).abs() < 1e-15);
        let quartic = FluxModel::new(Polynomial::new(vec![0.0, 0.0, 0.0, 0.0, 0.25]), (0.1, 2.0)).unwrap();
        assert!((rh_speed(&quartic, 1.0, 0.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rh_speed_limit_is_characteristic_speed() {
        let b = FluxModel::burgers();
        assert_eq!(rh_speed(&b, 0.7, 0.7), 0.7);
        assert!((rh_speed(&b, 0.7 + 1e-13, 0.7) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn alive_and_position_between_samples() {
        let mk = |t: f64, x: f64| ShockSample {
            t,
            x,
            y_left: 0.0,
            y_right: 0.0,
            u_left: 1.0,
            u_right: 0.0,
            ux_left: 0.0,
            ux_right: 0.0,
            speed: 0.5,
        };
        let s = ShockCurve {
            id: 0,
            birth_t: 0.0,
            birth_x: 0.0,
            origin: Origin::Formation { y: 0.0, generic: true },
            samples: vec![mk(0.0, 0.0), mk(1.0, 0.5)],
            death: Some(Death { t: 1.0, cause: DeathCause::MergedInto(1) }),
        };
        assert!((s.position_at(0.4).unwrap() - 0.2).abs() < 1e-15);
        assert!(s.alive_at(0.999) && !s.alive_at(1.0));
        assert_eq!(s.sample_before(0.5).unwrap().t, 0.0);
    }
}

