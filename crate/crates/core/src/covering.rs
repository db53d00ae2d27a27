//! Covering-set realizations `I_n = B(ξ_n, ℓ_n)` and their level-k footprints.
//!
//! Block k balls are matched against level-k cubes in two ways: cubes a ball
//! contains and cubes it meets. Both are kept for the whole block and for
//! its sparse subfamily. A cube "of G" is a surviving cube of the target
//! tree; cubes touching G only at an endpoint are not counted.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::process::OrbitSource;
use crate::scalar::ExactScalar;
use crate::sequences::{BlockTable, RadiusSequence};
use crate::space::{ball_footprint, ball_footprint_in, Ball, Cube, DigitSpace};
use crate::target::TargetSet;

pub const BALL_CSV_SCHEMA: &str = "# schema: covset-balls v1";

/// Earliest admissible start of the hitting window.
pub const MIN_TAIL_START: u32 = 3;

/// Default hitting window start: the last third of the blocks.
pub fn tail_start(k_max: u32) -> u32 {
    (k_max - k_max / 3).max(MIN_TAIL_START)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    /// Every ball of the block.
    All,
    /// The gap-separated subfamily.
    Sparse,
}

#[derive(Clone, Debug)]
pub struct CoverBall<Q> {
    pub n: u64,
    pub ball: Ball<Q>,
    pub selected: bool,
}

/// Level-k cube indices hit by one block.
#[derive(Clone, Debug, Default)]
pub struct BlockHits {
    pub contained: Vec<u64>,
    pub meeting: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct BlockTrace<Q> {
    pub k: u32,
    pub n_k: u64,
    pub m_k: u64,
    pub balls: Vec<CoverBall<Q>>,
    pub all: BlockHits,
    pub sparse: BlockHits,
    /// Largest number of level-k cubes examined for a single ball.
    pub max_tested: usize,
}

impl<Q> BlockTrace<Q> {
    pub fn hits(&self, selection: Selection) -> &BlockHits {
        match selection {
            Selection::All => &self.all,
            Selection::Sparse => &self.sparse,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoverTrace<Q> {
    pub space: DigitSpace<Q>,
    pub seed: u64,
    pub k_max: u32,
    pub blocks: Vec<BlockTrace<Q>>,
}

fn sorted(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v.dedup();
    v
}

impl<Q: ExactScalar> CoverTrace<Q> {
    /// Builds a trace from explicit balls; `blocks[k-1]` holds block k.
    pub fn from_balls(space: DigitSpace<Q>, seed: u64, blocks: Vec<Vec<CoverBall<Q>>>) -> Self {
        let k_max = blocks.len() as u32;
        let blocks = blocks
            .into_iter()
            .enumerate()
            .map(|(i, balls)| {
                let k = i as u32 + 1;
                let (mut all, mut sparse) = (BlockHits::default(), BlockHits::default());
                let mut max_tested = 0;
                for b in &balls {
                    let fp = ball_footprint(&space, &b.ball, k);
                    max_tested = max_tested.max(fp.tested);
                    if b.selected {
                        sparse.contained.extend_from_slice(&fp.contained);
                        sparse.meeting.extend_from_slice(&fp.meeting);
                    }
                    all.contained.extend(fp.contained);
                    all.meeting.extend(fp.meeting);
                }
                let m_k = balls.iter().filter(|b| b.selected).count() as u64;
                BlockTrace {
                    k,
                    n_k: balls.len() as u64,
                    m_k,
                    balls,
                    all: BlockHits { contained: sorted(all.contained), meeting: sorted(all.meeting) },
                    sparse: BlockHits { contained: sorted(sparse.contained), meeting: sorted(sparse.meeting) },
                    max_tested,
                }
            })
            .collect();
        CoverTrace { space, seed, k_max, blocks }
    }

    pub fn block(&self, k: u32) -> &BlockTrace<Q> {
        &self.blocks[k as usize - 1]
    }

    /// `S_k`: cubes of G met by the sparse subfamily of block k.
    pub fn s_k(&self, g: &TargetSet, k: u32) -> u64 {
        self.block(k).sparse.meeting.iter().filter(|&&i| g.contains_cube(&Cube { level: k, index: i })).count()
            as u64
    }

    pub fn write_balls_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{BALL_CSV_SCHEMA}")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["seed", "k", "n", "center", "radius", "selected"])?;
        for block in &self.blocks {
            for b in &block.balls {
                w.write_record([
                    self.seed.to_string(),
                    block.k.to_string(),
                    b.n.to_string(),
                    b.ball.center.to_string(),
                    b.ball.radius.to_string(),
                    (b.selected as u8).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Realizes blocks `1..=k_max` of the covering with orbit centres at depth `k_max + 2`.
pub fn simulate_cover<Q: ExactScalar>(
    seq: &RadiusSequence<Q>,
    table: &BlockTable<Q>,
    src: &mut OrbitSource<Q>,
    k_max: u32,
) -> Result<CoverTrace<Q>> {
    if k_max > table.k_max() {
        return Err(Error::Truncated { block: table.k_max() + 1 });
    }
    let space = src.space().clone();
    if table.base() != space.base() {
        return Err(Error::invalid("block table and space use different bases"));
    }
    let depth = k_max + 2;
    space.check_depth(depth)?;
    let one = Q::one();
    let mut blocks = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let range = table.range(k);
        let gap = table.gap(k);
        let mut balls = Vec::with_capacity((range.end - range.start) as usize);
        for n in range.clone() {
            let radius = seq.radius(n).ok_or(Error::Truncated { block: k })?;
            let radius = if radius > one { one.clone() } else { radius };
            let center = src.orbit_point(n, depth)?.value;
            balls.push(CoverBall { n, ball: Ball::new(center, radius)?, selected: (n - range.start) % gap == 0 });
        }
        blocks.push(balls);
    }
    Ok(CoverTrace::from_balls(space, src.seed(), blocks))
}

/// Finite-depth hitting proxy: every nonempty block in `[k_min, k_max]`
/// contains some cube of G.
pub fn hit_target_with<Q: ExactScalar>(
    trace: &CoverTrace<Q>,
    g: &TargetSet,
    k_min: u32,
    k_max: u32,
    selection: Selection,
) -> Result<bool> {
    if k_min < MIN_TAIL_START {
        return Err(Error::invalid(format!("k_min must be at least {MIN_TAIL_START}")));
    }
    if k_max > trace.k_max {
        return Err(Error::Truncated { block: trace.k_max + 1 });
    }
    Ok((k_min..=k_max).all(|k| {
        let block = trace.block(k);
        block.n_k == 0
            || block.hits(selection).contained.iter().any(|&i| g.contains_cube(&Cube { level: k, index: i }))
    }))
}

pub fn hit_target<Q: ExactScalar>(trace: &CoverTrace<Q>, g: &TargetSet, k_min: u32, k_max: u32) -> Result<bool> {
    hit_target_with(trace, g, k_min, k_max, Selection::All)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubeCountRow {
    pub k: u32,
    /// Cubes of G at level k met by any ball of blocks `m0..=K`.
    pub tail_union: u64,
    /// Cubes of G at level k met by block k, when `k ≥ m0`.
    pub stage: u64,
}

pub fn limsup_cube_counts<Q: ExactScalar>(trace: &CoverTrace<Q>, g: &TargetSet, m0: u32) -> Vec<CubeCountRow> {
    let k_max = trace.k_max;
    let m = trace.space.base();
    let mut union: Vec<Vec<u64>> = vec![Vec::new(); k_max as usize];
    for j in m0.max(1)..=k_max {
        for b in &trace.block(j).balls {
            let levels = footprint_levels(m, &b.ball, k_max, g);
            for (k, ids) in levels.into_iter().enumerate() {
                union[k].extend(ids);
            }
        }
    }
    (1..=k_max)
        .map(|k| {
            let ids = sorted(std::mem::take(&mut union[k as usize - 1]));
            let stage = if k >= m0 {
                trace.block(k).all.meeting.iter().filter(|&&i| g.contains_cube(&Cube { level: k, index: i })).count()
                    as u64
            } else {
                0
            };
            CubeCountRow { k, tail_union: ids.len() as u64, stage }
        })
        .collect()
}

/// Cubes of G meeting a ball at every level `1..=k_max`.
fn footprint_levels<Q: ExactScalar>(base: u32, ball: &Ball<Q>, k_max: u32, g: &TargetSet) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(k_max as usize);
    let mut frontier = vec![0u64];
    for j in 1..=k_max {
        let window = crate::space::IndexWindow::of(ball, base, j);
        let digits = g.digits_at(j);
        frontier = frontier
            .iter()
            .flat_map(|&i| digits.iter().map(move |&d| i * base as u64 + d as u64))
            .filter(|&c| window.meets(c))
            .collect();
        out.push(frontier.clone());
    }
    out
}

/// Level-k cubes of G met by a ball, via the same pruned walk.
pub fn target_footprint<Q: ExactScalar>(ball: &Ball<Q>, k: u32, g: &TargetSet) -> Vec<u64> {
    ball_footprint_in(g.base(), ball, k, |j| g.digits_at(j)).meeting
}
