//! Base-m digit spaces: points, cylinder cubes, balls and the nesting family.
//!
//! A cube of level k is the closed m-adic interval `[v, v + m^-k]` whose left
//! endpoint `v` is spelled by a prefix over the alphabet. Cubes are stored by
//! their base-m index so that lexicographic prefix order is integer order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;

/// Serializable description of a digit space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub base: u32,
    pub alphabet: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_cap: Option<u32>,
}

/// Largest depth for which cube indices fit the u64 budget.
fn hard_depth_limit(base: u32) -> u32 {
    (62.0 / (base as f64).log2()).floor() as u32
}

fn default_depth_cap(base: u32) -> u32 {
    match base {
        2 => 24,
        _ => ((16.0 * 3f64.ln() / (base as f64).ln()).floor() as u32).max(1),
    }
}

#[derive(Clone, Debug)]
pub struct DigitSpace<Q> {
    base: u32,
    alphabet: Vec<u8>,
    depth_cap: u32,
    dim: f64,
    c1: f64,
    hull_lo: Q,
    hull_hi: Q,
    r_in: Q,
    r_out: Q,
}

impl<Q: ExactScalar> DigitSpace<Q> {
    pub fn new(base: u32, alphabet: &[u8]) -> Result<Self> {
        if !(2..=64).contains(&base) {
            return Err(Error::invalid(format!("base {base} outside 2..=64")));
        }
        let mut digits = alphabet.to_vec();
        digits.sort_unstable();
        digits.dedup();
        if digits.len() < 2 {
            return Err(Error::invalid("alphabet needs at least two digits"));
        }
        if digits.iter().any(|&d| d as u32 >= base) {
            return Err(Error::invalid(format!("alphabet digit outside 0..{base}")));
        }
        let m1 = base as i128 - 1;
        let lo = *digits.first().unwrap() as i128;
        let hi = *digits.last().unwrap() as i128;
        let size = digits.len() as f64;
        Ok(DigitSpace {
            base,
            depth_cap: default_depth_cap(base),
            dim: size.ln() / (base as f64).ln(),
            c1: 3.0 * size,
            hull_lo: Q::from_ratio(lo, m1),
            hull_hi: Q::from_ratio(hi, m1),
            r_in: Q::from_ratio(hi - lo, 2 * m1),
            r_out: Q::from_ratio(hi, m1),
            alphabet: digits,
        })
    }

    pub fn full(base: u32) -> Result<Self> {
        let digits: Vec<u8> = (0..base as u8).collect();
        Self::new(base, &digits)
    }

    /// Middle-third Cantor set in base 3.
    pub fn cantor() -> Self {
        Self::new(3, &[0, 2]).expect("valid preset")
    }

    pub fn from_spec(spec: &SpaceSpec) -> Result<Self> {
        let space = Self::new(spec.base, &spec.alphabet)?;
        match spec.depth_cap {
            Some(cap) => space.with_depth_cap(cap),
            None => Ok(space),
        }
    }

    pub fn with_depth_cap(mut self, cap: u32) -> Result<Self> {
        let limit = hard_depth_limit(self.base);
        if cap == 0 || cap > limit {
            return Err(Error::invalid(format!("depth cap {cap} outside 1..={limit}")));
        }
        self.depth_cap = cap;
        Ok(self)
    }

    pub fn spec(&self) -> SpaceSpec {
        SpaceSpec { base: self.base, alphabet: self.alphabet.clone(), depth_cap: Some(self.depth_cap) }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn depth_cap(&self) -> u32 {
        self.depth_cap
    }

    /// Similarity dimension `log|D| / log m`.
    pub fn dim(&self) -> f64 {
        self.dim
    }

    /// Ahlfors regularity constant of the uniform digit measure.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn scale_b(&self) -> Q {
        Q::from_ratio(1, self.base as i128)
    }

    /// Radius factor of the ball each cube contains, centred at its hull midpoint.
    pub fn r_in(&self) -> &Q {
        &self.r_in
    }

    /// Radius factor of the ball each cube lies in, centred at its left endpoint.
    pub fn r_out(&self) -> &Q {
        &self.r_out
    }

    /// Convex hull of X.
    pub fn hull(&self) -> (Q, Q) {
        (self.hull_lo.clone(), self.hull_hi.clone())
    }

    pub fn check_depth(&self, k: u32) -> Result<()> {
        if k > self.depth_cap {
            Err(Error::DepthCap { requested: k, cap: self.depth_cap })
        } else {
            Ok(())
        }
    }

    pub fn cube_width(&self, k: u32) -> Q {
        Q::inv_pow(self.base, k)
    }

    pub fn contains_digit(&self, d: u8) -> bool {
        self.alphabet.binary_search(&d).is_ok()
    }

    /// Upper bound on the number of level-k cubes a ball of radius
    /// `a0 * m^-k` can meet.
    pub fn meeting_bound(&self, a0: f64) -> f64 {
        let s = self.dim;
        self.c1 * self.c1 * (2.0 * self.r_out.to_f64() + a0).powf(s) / self.r_in.to_f64().powf(s)
    }

    pub fn point(&self, digits: &[u8]) -> Result<Point<Q>> {
        if digits.iter().any(|&d| !self.contains_digit(d)) {
            return Err(Error::invalid("point digit outside the alphabet"));
        }
        let k = digits.len() as u32;
        let index = digits.iter().fold(0i128, |acc, &d| acc * self.base as i128 + d as i128);
        Ok(Point { digits: digits.to_vec(), value: Q::from_scaled(index, self.base, k) })
    }

    pub fn cube(&self, prefix: &[u8]) -> Result<Cube> {
        if prefix.iter().any(|&d| !self.contains_digit(d)) {
            return Err(Error::invalid("cube prefix digit outside the alphabet"));
        }
        Ok(Cube::from_prefix(self.base, prefix))
    }
}

/// A finite digit expansion and its exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Point<Q> {
    pub digits: Vec<u8>,
    pub value: Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub level: u32,
    /// Prefix read as a base-m integer.
    pub index: u64,
}

impl Cube {
    pub const ROOT: Cube = Cube { level: 0, index: 0 };

    pub fn from_prefix(base: u32, prefix: &[u8]) -> Self {
        let index = prefix.iter().fold(0u64, |acc, &d| acc * base as u64 + d as u64);
        Cube { level: prefix.len() as u32, index }
    }

    pub fn prefix(&self, base: u32) -> Vec<u8> {
        let mut digits = vec![0u8; self.level as usize];
        let mut rest = self.index;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % base as u64) as u8;
            rest /= base as u64;
        }
        digits
    }

    pub fn child(&self, base: u32, digit: u8) -> Cube {
        Cube { level: self.level + 1, index: self.index * base as u64 + digit as u64 }
    }

    pub fn parent(&self, base: u32) -> Option<Cube> {
        (self.level > 0).then(|| Cube { level: self.level - 1, index: self.index / base as u64 })
    }

    pub fn last_digit(&self, base: u32) -> Option<u8> {
        (self.level > 0).then(|| (self.index % base as u64) as u8)
    }

    pub fn children<'a, Q>(&'a self, space: &'a DigitSpace<Q>) -> impl Iterator<Item = Cube> + 'a {
        space.alphabet.iter().map(move |&d| self.child(space.base, d))
    }

    /// Closed interval `[v, v + m^-level]`.
    pub fn interval<Q: ExactScalar>(&self, base: u32) -> (Q, Q) {
        let v = Q::from_scaled(self.index as i128, base, self.level);
        let w = Q::inv_pow(base, self.level);
        let end = v.clone() + w;
        (v, end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball<Q> {
    pub center: Q,
    pub radius: Q,
}

impl<Q: ExactScalar> Ball<Q> {
    pub fn new(center: Q, radius: Q) -> Result<Self> {
        if radius <= Q::zero() {
            return Err(Error::invalid("ball radius must be positive"));
        }
        Ok(Ball { center, radius })
    }

    /// Ball with the closed interval `[lo, hi]` as its extent.
    pub fn from_interval(lo: Q, hi: Q) -> Result<Self> {
        let two = Q::from_i128(2);
        Self::new((lo.clone() + hi.clone()) / two.clone(), (hi - lo) / two)
    }

    pub fn lo(&self) -> Q {
        self.center.clone() - self.radius.clone()
    }

    pub fn hi(&self) -> Q {
        self.center.clone() + self.radius.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Disjoint,
    Intersects,
    BallContainsCube,
}

pub fn ball_cube_relation<Q: ExactScalar>(base: u32, ball: &Ball<Q>, cube: &Cube) -> Relation {
    let (v, end) = cube.interval::<Q>(base);
    let (lo, hi) = (ball.lo(), ball.hi());
    if hi < v || lo > end {
        Relation::Disjoint
    } else if lo <= v && end <= hi {
        Relation::BallContainsCube
    } else {
        Relation::Intersects
    }
}

pub fn cubes_at_level<Q: ExactScalar>(space: &DigitSpace<Q>, k: u32) -> Result<Vec<Cube>> {
    space.check_depth(k)?;
    let mut level = vec![Cube::ROOT];
    for _ in 0..k {
        level = level.iter().flat_map(|c| c.children(space)).collect();
    }
    Ok(level)
}

/// Index bounds of level-k m-adic intervals meeting (resp. inside) a ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexWindow {
    pub meet: (i128, i128),
    pub inside: (i128, i128),
}

impl IndexWindow {
    pub fn of<Q: ExactScalar>(ball: &Ball<Q>, base: u32, k: u32) -> Self {
        let (lo, hi) = (ball.lo(), ball.hi());
        let lo_c = lo.ceil_scaled(base, k);
        let hi_f = hi.floor_scaled(base, k);
        IndexWindow { meet: (lo_c - 1, hi_f), inside: (lo_c, hi_f - 1) }
    }

    pub fn meets(&self, index: u64) -> bool {
        let i = index as i128;
        self.meet.0 <= i && i <= self.meet.1
    }

    pub fn contains(&self, index: u64) -> bool {
        let i = index as i128;
        self.inside.0 <= i && i <= self.inside.1
    }
}

/// Level-k cubes of a digit tree meeting a ball, found by top-down pruning.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Footprint {
    pub meeting: Vec<u64>,
    pub contained: Vec<u64>,
    /// Cubes examined at the final level.
    pub tested: usize,
}

/// Walks the tree whose level-j children use `digits_at(j)`.
pub fn ball_footprint_in<'a, Q, F>(base: u32, ball: &Ball<Q>, k: u32, digits_at: F) -> Footprint
where
    Q: ExactScalar,
    F: Fn(u32) -> &'a [u8],
{
    let mut frontier = vec![0u64];
    let mut tested = 1;
    for j in 1..=k {
        let window = IndexWindow::of(ball, base, j);
        let digits = digits_at(j);
        tested = frontier.len() * digits.len();
        frontier = frontier
            .iter()
            .flat_map(|&i| digits.iter().map(move |&d| i * base as u64 + d as u64))
            .filter(|&c| window.meets(c))
            .collect();
        if frontier.is_empty() {
            break;
        }
    }
    let window = IndexWindow::of(ball, base, k);
    let contained = frontier.iter().copied().filter(|&i| window.contains(i)).collect();
    Footprint { meeting: frontier, contained, tested }
}

pub fn ball_footprint<Q: ExactScalar>(space: &DigitSpace<Q>, ball: &Ball<Q>, k: u32) -> Footprint {
    ball_footprint_in(space.base, ball, k, |_| space.alphabet())
}

pub fn count_cubes_meeting_ball<Q: ExactScalar>(
    space: &DigitSpace<Q>,
    k: u32,
    ball: &Ball<Q>,
) -> Result<u64> {
    space.check_depth(k)?;
    Ok(ball_footprint(space, ball, k).meeting.len() as u64)
}

/// Measure of a ball by counting cylinders at `level`: (meeting, contained) mass.
pub fn cylinder_measure<Q: ExactScalar>(space: &DigitSpace<Q>, ball: &Ball<Q>, level: u32) -> (f64, f64) {
    let fp = ball_footprint(space, ball, level);
    let total = (space.alphabet.len() as f64).powi(level as i32);
    (fp.meeting.len() as f64 / total, fp.contained.len() as f64 / total)
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelCount {
    pub level: u32,
    pub count: u64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NestingReport {
    pub base: u32,
    pub alphabet: Vec<u8>,
    pub k_max: u32,
    pub r_in: String,
    pub r_out: String,
    pub c1: f64,
    pub levels: Vec<LevelCount>,
}

/// Cube family indexed by level, level 0 holding the root.
pub fn nesting_family<Q: ExactScalar>(space: &DigitSpace<Q>, k_max: u32) -> Result<Vec<Vec<Cube>>> {
    (0..=k_max).map(|k| cubes_at_level(space, k)).collect()
}

pub fn nesting_family_report<Q: ExactScalar>(space: &DigitSpace<Q>, k_max: u32) -> Result<NestingReport> {
    if k_max < 1 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let family = nesting_family(space, k_max)?;
    verify_nesting_family(space, &family)
}

fn fail(property: u8, base: u32, cube: &Cube) -> Error {
    Error::Nesting { property, level: cube.level, prefix: cube.prefix(base) }
}

/// Checks partition, nesting, inner/outer balls and the cardinality bracket.
pub fn verify_nesting_family<Q: ExactScalar>(
    space: &DigitSpace<Q>,
    family: &[Vec<Cube>],
) -> Result<NestingReport> {
    let m = space.base;
    let k_max = family.len().saturating_sub(1) as u32;
    let (h_lo, h_hi) = space.hull();
    let two = Q::from_i128(2);
    let mut levels = Vec::new();
    let mut reference = vec![Cube::ROOT];

    for (k, cubes) in family.iter().enumerate() {
        let k = k as u32;
        let w = space.cube_width(k);
        let mut sorted = cubes.clone();
        sorted.sort();

        // (1) partition
        for c in &sorted {
            if c.level != k || c.prefix(m).iter().any(|&d| !space.contains_digit(d)) {
                return Err(fail(1, m, c));
            }
        }
        let intervals: Vec<(Q, Q)> = sorted.iter().map(|c| c.interval(m)).collect();
        for (pair, cs) in intervals.windows(2).zip(sorted.windows(2)) {
            if pair[1].0 < pair[0].1 {
                return Err(fail(1, m, &cs[1]));
            }
        }
        let mut merged: Vec<(Q, Q)> = Vec::new();
        for (a, b) in intervals.iter().cloned() {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = b,
                _ => merged.push((a, b)),
            }
        }
        for c in &reference {
            let (v, _) = c.interval::<Q>(m);
            let lo = v.clone() + h_lo.clone() * w.clone();
            let hi = v + h_hi.clone() * w.clone();
            if !merged.iter().any(|(a, b)| *a <= lo && hi <= *b) {
                return Err(fail(1, m, c));
            }
        }

        // (2) nesting into the previous level
        if k > 0 {
            let parents = &family[k as usize - 1];
            let mut parents_sorted = parents.clone();
            parents_sorted.sort();
            let parent_iv: Vec<(Q, Q)> = parents_sorted.iter().map(|c| c.interval(m)).collect();
            for (c, (v, e)) in sorted.iter().zip(&intervals) {
                let pos = parent_iv.partition_point(|(a, _)| a <= v);
                let lo = pos.saturating_sub(2);
                let hits = parent_iv[lo..pos.min(parent_iv.len())]
                    .iter()
                    .filter(|(a, b)| a <= v && e <= b)
                    .count();
                if hits != 1 {
                    return Err(fail(2, m, c));
                }
            }
        }

        // (3) inner and outer balls
        let r_in = space.r_in().clone() * w.clone();
        let r_out = space.r_out().clone() * w.clone();
        let hulls: Vec<(Q, Q)> = intervals
            .iter()
            .map(|(v, _)| (v.clone() + h_lo.clone() * w.clone(), v.clone() + h_hi.clone() * w.clone()))
            .collect();
        for (i, c) in sorted.iter().enumerate() {
            let (v, e) = &intervals[i];
            let (a, b) = &hulls[i];
            let mid = (a.clone() + b.clone()) / two.clone();
            if mid.clone() - r_in.clone() < *v || mid.clone() + r_in.clone() > *e {
                return Err(fail(3, m, c));
            }
            if i > 0 && mid.clone() - hulls[i - 1].1.clone() < r_in {
                return Err(fail(3, m, c));
            }
            if i + 1 < hulls.len() && hulls[i + 1].0.clone() - mid.clone() < r_in {
                return Err(fail(3, m, c));
            }
            if *b > v.clone() + r_out.clone() || *a < v.clone() - r_out.clone() {
                return Err(fail(3, m, c));
            }
        }

        // cardinality bracket
        let s = space.dim();
        let scale = (m as f64).powf(k as f64 * s);
        let lower = scale / (space.c1() * space.r_out().to_f64().powf(s));
        let upper = scale * space.c1() / space.r_in().to_f64().powf(s);
        let count = sorted.len() as u64;
        let slack = 1e-12 * scale;
        if (count as f64) < lower - slack || (count as f64) > upper + slack {
            return Err(Error::Nesting { property: 0, level: k, prefix: Vec::new() });
        }
        levels.push(LevelCount { level: k, count, lower, upper });

        reference = reference.iter().flat_map(|c| c.children(space)).collect();
    }

    Ok(NestingReport {
        base: m,
        alphabet: space.alphabet().to_vec(),
        k_max,
        r_in: space.r_in().to_string(),
        r_out: space.r_out().to_string(),
        c1: space.c1(),
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn q(n: i128, d: i128) -> Rational {
        Ratio::new(n, d)
    }

    #[test]
    fn cantor_first_level() {
        let space = DigitSpace::<Rational>::cantor();
        let cubes = cubes_at_level(&space, 1).unwrap();
        let prefixes: Vec<_> = cubes.iter().map(|c| c.prefix(3)).collect();
        assert_eq!(prefixes, vec![vec![0], vec![2]]);
    }

    #[test]
    fn cantor_level_five_within_bracket() {
        let space = DigitSpace::<Rational>::cantor();
        assert_eq!(cubes_at_level(&space, 5).unwrap().len(), 32);
        let report = nesting_family_report(&space, 5).unwrap();
        let l5 = &report.levels[5];
        assert!(l5.lower <= 32.0 && 32.0 <= l5.upper);
    }

    #[test]
    fn binary_level_ten_tiles_unit_interval() {
        let space = DigitSpace::<Rational>::full(2).unwrap();
        let cubes = cubes_at_level(&space, 10).unwrap();
        assert_eq!(cubes.len(), 1024);
        let ivs: Vec<(Rational, Rational)> = cubes.iter().map(|c| c.interval(2)).collect();
        assert_eq!(ivs[0].0, q(0, 1));
        assert_eq!(ivs[1023].1, q(1, 1));
        for w in ivs.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        for i in (0..1024).step_by(37) {
            for j in (i + 2..1024).step_by(53) {
                assert!(ivs[i].1 < ivs[j].0);
            }
        }
    }

    #[test]
    fn relation_examples() {
        let space = DigitSpace::<Rational>::cantor();
        let ball = Ball::new(q(1, 18), q(1, 18)).unwrap();
        let cube = space.cube(&[0, 0]).unwrap();
        assert_eq!(ball_cube_relation(3, &ball, &cube), Relation::BallContainsCube);
        let ball = Ball::new(q(1, 2), q(1, 10)).unwrap();
        let cube = space.cube(&[0]).unwrap();
        assert_eq!(ball_cube_relation(3, &ball, &cube), Relation::Disjoint);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        assert!(Ball::new(q(1, 2), q(0, 1)).is_err());
    }

    #[test]
    fn counts_near_the_middle() {
        let space = DigitSpace::<Rational>::full(2).unwrap();
        let ball = Ball::new(q(1, 2), q(1, 256)).unwrap();
        let n = count_cubes_meeting_ball(&space, 8, &ball).unwrap();
        assert!((2..=4).contains(&n), "count {n}");
        let brute = cubes_at_level(&space, 8)
            .unwrap()
            .iter()
            .filter(|c| ball_cube_relation(2, &ball, c) != Relation::Disjoint)
            .count() as u64;
        assert_eq!(n, brute);
    }

    #[test]
    fn ball_outside_hull_meets_nothing() {
        let space = DigitSpace::<Rational>::new(3, &[0, 1]).unwrap();
        let ball = Ball::new(q(9, 10), q(1, 20)).unwrap();
        assert_eq!(count_cubes_meeting_ball(&space, 6, &ball).unwrap(), 0);
    }

    #[test]
    fn nesting_constants() {
        let cantor = DigitSpace::<Rational>::cantor();
        let report = nesting_family_report(&cantor, 8).unwrap();
        assert_eq!(report.r_in, "1/2");
        assert_eq!(report.r_out, "1");
        assert!(nesting_family_report(&DigitSpace::<Rational>::full(2).unwrap(), 10).is_ok());
        let gappy = DigitSpace::<Rational>::new(5, &[0, 1, 3]).unwrap();
        assert_eq!(gappy.r_in(), &q(3, 8));
        assert_eq!(gappy.r_out(), &q(3, 4));
    }

    #[test]
    fn corrupted_family_fails_partition() {
        let space = DigitSpace::<Rational>::cantor();
        let mut family = nesting_family(&space, 4).unwrap();
        family[3].remove(5);
        match verify_nesting_family(&space, &family) {
            Err(Error::Nesting { property, level, .. }) => {
                assert_eq!(property, 1);
                assert_eq!(level, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn depth_cap_enforced() {
        let space = DigitSpace::<Rational>::cantor();
        assert_eq!(space.depth_cap(), 16);
        assert!(matches!(cubes_at_level(&space, 17), Err(Error::DepthCap { .. })));
        assert_eq!(DigitSpace::<Rational>::full(2).unwrap().depth_cap(), 24);
    }

    #[test]
    fn dimension_and_regularity_constant() {
        let cantor = DigitSpace::<Rational>::cantor();
        assert!((cantor.dim() - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert_eq!(cantor.c1(), 6.0);
        assert_eq!(DigitSpace::<Rational>::full(4).unwrap().dim(), 1.0);
    }

    fn arb_space() -> impl Strategy<Value = DigitSpace<Rational>> {
        prop_oneof![
            Just(DigitSpace::full(2).unwrap()),
            Just(DigitSpace::cantor()),
            Just(DigitSpace::new(5, &[0, 1, 3]).unwrap()),
            Just(DigitSpace::full(3).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn shrinking_radius_is_monotone(
            space in arb_space(),
            k in 1u32..6,
            pick in any::<u64>(),
            c in 0i128..1000,
            r1 in 1i128..500,
            r2 in 1i128..500,
        ) {
            let cubes = cubes_at_level(&space, k).unwrap();
            let cube = cubes[(pick % cubes.len() as u64) as usize];
            let (big, small) = (r1.max(r2), r1.min(r2));
            let center = q(c, 1000);
            let outer = ball_cube_relation(space.base(), &Ball::new(center, q(big, 1000)).unwrap(), &cube);
            let inner = ball_cube_relation(space.base(), &Ball::new(center, q(small, 1000)).unwrap(), &cube);
            let rank = |r: Relation| match r { Relation::Disjoint => 0, Relation::Intersects => 1, Relation::BallContainsCube => 2 };
            prop_assert!(rank(inner) <= rank(outer));
        }

        #[test]
        fn footprint_matches_scan_and_bound(
            space in arb_space(),
            k in 1u32..7,
            c in 0i128..729,
            a0 in 1i128..40,
        ) {
            let m = space.base();
            let radius = Rational::from_scaled(a0, m, k) / q(4, 1);
            let ball = Ball::new(q(c, 729), radius).unwrap();
            let fp = ball_footprint(&space, &ball, k);
            let cubes = cubes_at_level(&space, k).unwrap();
            let meet: Vec<u64> = cubes.iter().filter(|c| ball_cube_relation(m, &ball, c) != Relation::Disjoint).map(|c| c.index).collect();
            let inside: Vec<u64> = cubes.iter().filter(|c| ball_cube_relation(m, &ball, c) == Relation::BallContainsCube).map(|c| c.index).collect();
            prop_assert_eq!(&fp.meeting, &meet);
            prop_assert_eq!(&fp.contained, &inside);
            prop_assert!((fp.meeting.len() as f64) <= space.meeting_bound(a0 as f64 / 4.0));
        }

        #[test]
        fn cylinder_measure_is_ahlfors_regular(
            space in arb_space(),
            digits in proptest::collection::vec(any::<u8>(), 8),
            r_num in 1i128..4096,
        ) {
            let m = space.base();
            let k_max = 6u32;
            let alphabet = space.alphabet().to_vec();
            let xd: Vec<u8> = digits.iter().map(|d| alphabet[*d as usize % alphabet.len()]).collect();
            let x = space.point(&xd).unwrap();
            let floor = Rational::inv_pow(m, k_max);
            let r = floor + (q(1, 1) - floor) * q(r_num, 4096);
            let level = (1.0 / r.to_f64()).log(m as f64).ceil().max(0.0) as u32 + 2;
            let (meet, inside) = cylinder_measure(&space, &Ball::new(x.value, r).unwrap(), level);
            let rs = r.to_f64().powf(space.dim());
            let c1 = space.c1();
            prop_assert!(meet <= c1 * rs * (1.0 + 1e-12));
            prop_assert!(inside >= rs / c1 * (1.0 - 1e-12));
        }
    }
}
