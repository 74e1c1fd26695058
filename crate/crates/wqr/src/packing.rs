//! Greedy generation of approximate exact packings with certified uncovered
//! measure.
//!
//! The packer places disjoint balls inside a region in two stages: an optional
//! forced cubic grid of balls with one exact radius (the Cantor spine of the
//! dimension construction), then a best-first refinement over dyadic boxes.
//! Each box carries a Lipschitz upper bound on the admissible ball radius
//! inside it; the box with the best bound is split (halved per axis) until its
//! center's own admissible ball dominates the box uncertainty, at which point
//! that ball is inscribed, largest pockets first. Balls are pairwise disjoint
//! and contained in the region by construction, so the uncovered measure is
//! known exactly as `|region| - sum of ball volumes`; a seeded Monte Carlo
//! estimate is attached as an independent certificate.
//!
//! The placement sequence is a deterministic function of the inputs alone;
//! the tolerance `eta` and the caps only decide where the sequence stops.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Ball, Point, Region, GEOM_REL_TOL};
use crate::rng::{derive_rng, streams};

/// Caps and tolerances for a single `pack` call.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PackOptions {
    /// Hard cap on the number of balls in one packing.
    pub max_balls: usize,
    /// Refinement stops once the next ball radius would drop below
    /// `min_radius_rel * inradius(region)`.
    pub min_radius_rel: f64,
    /// Samples for the Monte Carlo certificate. 0 skips sampling and reports
    /// the exact disjoint-volume value with zero stderr.
    pub mc_samples: usize,
}

impl Default for PackOptions {
    fn default() -> Self {
        PackOptions {
            max_balls: 200_000,
            min_radius_rel: 1e-4,
            mc_samples: 100_000,
        }
    }
}

/// Forced content: `count` balls of radius exactly `radius`, placed first on a
/// cubic grid of pitch `2 * radius`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ForcedBalls {
    pub count: usize,
    pub radius: f64,
}

/// How a packing run terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FillStatus {
    /// Uncovered fraction reached the requested tolerance.
    MetTolerance,
    /// Refinement hit the radius floor before reaching the tolerance.
    RadiusFloor,
    /// Ball-count cap reached before the tolerance; packing is partial.
    BudgetExceeded,
}

/// A finite disjoint ball family inside a parent region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Packing {
    pub region: Region,
    pub balls: Vec<Ball>,
    /// The first `forced_count` balls carry the forced radius exactly.
    pub forced_count: usize,
    /// Monte Carlo estimate of |region \ union| / |region|.
    pub uncovered_fraction_estimate: f64,
    pub uncovered_fraction_stderr: f64,
    /// Exact uncovered fraction from disjoint volumes.
    pub uncovered_exact: f64,
    pub status: FillStatus,
}

impl Packing {
    pub fn max_radius(&self) -> f64 {
        self.balls.iter().map(|b| b.radius).fold(0.0, f64::max)
    }

    /// Verifies disjointness, containment, and the radius bound exactly as
    /// stated in the type invariants. Quadratic fallback is avoided via the
    /// same spatial index the packer uses.
    pub fn check_invariants(&self, delta_max: f64) -> Result<()> {
        let dim = self.region.dim();
        let mut grid = BallIndex::new(dim, delta_max.max(self.max_radius()));
        for (i, b) in self.balls.iter().enumerate() {
            if b.radius > delta_max * (1.0 + GEOM_REL_TOL) {
                return Err(Error::InvalidParameter(format!(
                    "ball {i} radius {} exceeds delta_max {delta_max}",
                    b.radius
                )));
            }
            if !self.region.contains_ball(b) {
                return Err(Error::InvalidParameter(format!(
                    "ball {i} not contained in the parent region"
                )));
            }
            let mut ok = true;
            grid.for_each_near(b.center.coords().as_slice(), b.radius, |j, other| {
                if !b.disjoint_from(other) {
                    ok = false;
                    let _ = j;
                }
            });
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "ball {i} overlaps an earlier ball"
                )));
            }
            grid.insert(i, b);
        }
        Ok(())
    }
}

/// Keys are already FNV-mixed cell hashes, so the map hasher is the identity.
#[derive(Default, Clone)]
struct PremixedHasher(u64);

impl std::hash::Hasher for PremixedHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, _: &[u8]) {
        unreachable!("only u64 keys are hashed")
    }
    fn write_u64(&mut self, i: u64) {
        self.0 = i;
    }
}

type CellMap = std::collections::HashMap<u64, Vec<u32>, std::hash::BuildHasherDefault<PremixedHasher>>;

/// One radius octave of the index: layer l holds balls with radius in
/// (top/2^{l+1}, top/2^l], hashed over cells of size 2*top/2^l, so a ball
/// spans at most 2 cells per axis.
struct Layer {
    cell: f64,
    map: CellMap,
    ids: Vec<u32>,
}

/// Radius-stratified spatial hash over ball bounding boxes. All queries are
/// exact; per-layer scans fall back to the layer's flat id list whenever the
/// cell range would be larger, so query cost stays bounded in open space.
struct BallIndex {
    dim: usize,
    top_radius: f64,
    layers: Vec<Layer>,
    centers: Vec<f64>,
    radii: Vec<f64>,
}

impl BallIndex {
    fn new(dim: usize, max_radius: f64) -> Self {
        BallIndex {
            dim,
            top_radius: max_radius,
            layers: Vec::new(),
            centers: Vec::new(),
            radii: Vec::new(),
        }
    }

    fn layer_of(&self, radius: f64) -> usize {
        if radius >= self.top_radius {
            return 0;
        }
        (self.top_radius / radius).log2().floor() as usize
    }

    /// Max ball radius stored in layer l.
    fn layer_radius(&self, l: usize) -> f64 {
        self.top_radius / (1u64 << l.min(62)) as f64
    }

    fn dist_minus_r(&self, x: &[f64], id: usize) -> f64 {
        let base = id * self.dim;
        let mut d2 = 0.0;
        for k in 0..self.dim {
            let dx = x[k] - self.centers[base + k];
            d2 += dx * dx;
        }
        d2.sqrt() - self.radii[id]
    }

    fn insert(&mut self, id: usize, ball: &Ball) {
        let c = ball.center.coords().as_slice();
        self.centers.extend_from_slice(c);
        self.radii.push(ball.radius);
        let l = self.layer_of(ball.radius);
        while self.layers.len() <= l {
            let cell = 2.0 * self.layer_radius(self.layers.len());
            self.layers.push(Layer {
                cell,
                map: CellMap::default(),
                ids: Vec::new(),
            });
        }
        let layer = &mut self.layers[l];
        layer.ids.push(id as u32);
        let lo: Vec<i64> = c
            .iter()
            .map(|&x| ((x - ball.radius) / layer.cell).floor() as i64)
            .collect();
        let hi: Vec<i64> = c
            .iter()
            .map(|&x| ((x + ball.radius) / layer.cell).floor() as i64)
            .collect();
        let map = &mut layer.map;
        visit_cell_hashes(self.dim, &lo, &hi, |h| {
            map.entry(h).or_default().push(id as u32);
        });
        debug_assert_eq!(self.radii.len(), id + 1);
    }

    /// Scans one layer for balls with dist - r < reach around x. Visits ids
    /// via cells when the range is small, via the flat list otherwise.
    fn scan_layer(&self, l: usize, x: &[f64], reach: f64, mut f: impl FnMut(usize)) {
        let layer = &self.layers[l];
        if layer.ids.is_empty() {
            return;
        }
        // any constraining ball's bbox intersects [x - reach, x + reach]
        let mut cells: u64 = 1;
        for _ in 0..self.dim {
            let per_axis = (2.0 * reach / layer.cell).ceil() as u64 + 2;
            cells = cells.saturating_mul(per_axis);
            if cells as usize > layer.ids.len() {
                break;
            }
        }
        if cells as usize > layer.ids.len() {
            for &id in &layer.ids {
                f(id as usize);
            }
            return;
        }
        let lo: Vec<i64> = x.iter().map(|&v| ((v - reach) / layer.cell).floor() as i64).collect();
        let hi: Vec<i64> = x.iter().map(|&v| ((v + reach) / layer.cell).floor() as i64).collect();
        // a ball may be registered in several scanned cells; duplicate visits
        // are harmless for every consumer (min-folds and predicates)
        visit_cell_hashes(self.dim, &lo, &hi, |h| {
            if let Some(ids) = layer.map.get(&h) {
                for &id in ids {
                    f(id as usize);
                }
            }
        });
    }

    /// Signed free radius at `x`: min over stored balls of dist - r, capped
    /// at `cap`. Negative values mean `x` lies that deep inside some ball.
    fn free_radius(&self, x: &[f64], cap: f64) -> f64 {
        self.free_radius_binding(x, cap).0
    }

    /// As `free_radius`, also reporting which ball binds the minimum.
    fn free_radius_binding(&self, x: &[f64], cap: f64) -> (f64, Option<usize>) {
        let mut best = cap;
        let mut arg = None;
        for l in 0..self.layers.len() {
            let reach = best + self.layer_radius(l);
            self.scan_layer(l, x, reach, |id| {
                let room = self.dist_minus_r(x, id);
                if room < best {
                    best = room;
                    arg = Some(id);
                }
            });
        }
        (best, arg)
    }

    /// Whether `x` lies inside any stored ball.
    fn covers(&self, x: &[f64]) -> bool {
        for l in 0..self.layers.len() {
            let layer = &self.layers[l];
            if layer.ids.is_empty() {
                continue;
            }
            let cell: Vec<i64> = x.iter().map(|&v| (v / layer.cell).floor() as i64).collect();
            let mut hit = false;
            visit_cell_hashes(self.dim, &cell, &cell, |h| {
                if hit {
                    return;
                }
                if let Some(ids) = layer.map.get(&h) {
                    for &id in ids {
                        let base = id as usize * self.dim;
                        let mut d2 = 0.0;
                        for k in 0..self.dim {
                            let dx = x[k] - self.centers[base + k];
                            d2 += dx * dx;
                        }
                        let r = self.radii[id as usize];
                        if d2 <= r * r {
                            hit = true;
                            return;
                        }
                    }
                }
            });
            if hit {
                return true;
            }
        }
        false
    }

    /// Visits every stored ball whose surface lies within `reach` of `x`.
    fn for_each_near(&self, x: &[f64], reach: f64, mut f: impl FnMut(usize, &Ball)) {
        for l in 0..self.layers.len() {
            self.scan_layer(l, x, reach + self.layer_radius(l), |id| {
                if self.dist_minus_r(x, id) <= reach {
                    let ball = Ball {
                        center: Point::new(
                            self.centers[id * self.dim..(id + 1) * self.dim].to_vec(),
                        ),
                        radius: self.radii[id],
                    };
                    f(id, &ball);
                }
            });
        }
    }
}

/// Binding constraint at a probe point: the obstacle realizing the
/// admissible radius there.
enum Binding {
    BallSurface(usize),
    Wall,
    Cap,
}

fn admissible_binding(
    region: &Region,
    index: &BallIndex,
    delta_max: f64,
    x: &[f64],
) -> (f64, Binding) {
    let b = region.boundary_clearance_slice(x) * (1.0 - GEOM_REL_TOL);
    let (f, arg) = index.free_radius_binding(x, delta_max);
    if f <= b {
        if f >= delta_max {
            (delta_max, Binding::Cap)
        } else {
            match arg {
                Some(id) => (f, Binding::BallSurface(id)),
                None => (f, Binding::Cap),
            }
        }
    } else if b >= delta_max {
        (delta_max, Binding::Cap)
    } else {
        (b, Binding::Wall)
    }
}

/// Ascends the admissible-radius field from one candidate point by stepping
/// away from the binding obstacle, one index query per step. The ball at the
/// returned position is admissible by construction; the ascent only has to
/// find a good pocket, not the exact maximizer.
fn slide_to_pocket(region: &Region, index: &BallIndex, delta_max: f64, scale: f64, x: &mut [f64]) -> f64 {
    let dim = x.len();
    let (mut best, mut binding) = admissible_binding(region, index, delta_max, x);
    let mut step = 0.75 * scale;
    let min_step = scale / 32.0;
    let mut probe = vec![0.0; dim];
    let mut dir = vec![0.0; dim];
    for _ in 0..24 {
        if step < min_step || best >= delta_max {
            break;
        }
        // direction away from the binding obstacle
        match binding {
            Binding::Cap => break,
            Binding::BallSurface(id) => {
                let base = id * dim;
                let mut norm2 = 0.0;
                for k in 0..dim {
                    dir[k] = x[k] - index.centers[base + k];
                    norm2 += dir[k] * dir[k];
                }
                if norm2 <= 0.0 {
                    break;
                }
                let inv = norm2.sqrt().recip();
                for d in dir.iter_mut() {
                    *d *= inv;
                }
            }
            Binding::Wall => {
                // gradient of the box/ball boundary clearance
                match region {
                    Region::Ball(b) => {
                        let mut norm2 = 0.0;
                        for k in 0..dim {
                            dir[k] = b.center.coords()[k] - x[k];
                            norm2 += dir[k] * dir[k];
                        }
                        if norm2 <= 0.0 {
                            break;
                        }
                        let inv = norm2.sqrt().recip();
                        for d in dir.iter_mut() {
                            *d *= inv;
                        }
                    }
                    Region::Box(d0) => {
                        let mut amin = f64::INFINITY;
                        let mut axis = 0;
                        let mut sgn = 1.0;
                        for k in 0..dim {
                            let lo = x[k] - d0.lower.coords()[k];
                            let hi = d0.upper.coords()[k] - x[k];
                            if lo < amin {
                                amin = lo;
                                axis = k;
                                sgn = 1.0;
                            }
                            if hi < amin {
                                amin = hi;
                                axis = k;
                                sgn = -1.0;
                            }
                        }
                        for d in dir.iter_mut() {
                            *d = 0.0;
                        }
                        dir[axis] = sgn;
                    }
                }
            }
        }
        for k in 0..dim {
            probe[k] = x[k] + step * dir[k];
        }
        let (v, b2) = admissible_binding(region, index, delta_max, &probe);
        if v > best {
            best = v;
            binding = b2;
            x.copy_from_slice(&probe);
        } else {
            step *= 0.5;
        }
    }
    best
}

/// Odometer over the integer box [lo, hi], invoking `f` with each cell's hash.
fn visit_cell_hashes(dim: usize, lo: &[i64], hi: &[i64], mut f: impl FnMut(u64)) {
    let mut idx = lo.to_vec();
    loop {
        let mut h: u64 = 0xcbf29ce484222325;
        for &c in idx.iter() {
            h ^= c as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        f(h);
        let mut d = 0;
        loop {
            if d == dim {
                return;
            }
            idx[d] += 1;
            if idx[d] <= hi[d] {
                break;
            }
            idx[d] = lo[d];
            d += 1;
        }
    }
}

/// Iterates the integer lattice points z with `origin + pitch*z` inside the
/// given bounds, in lexicographic order.
fn lattice_points(
    origin: &[f64],
    pitch: f64,
    lo: &[f64],
    hi: &[f64],
    mut f: impl FnMut(&[f64]) -> bool,
) {
    let dim = origin.len();
    let zlo: Vec<i64> = (0..dim)
        .map(|i| ((lo[i] - origin[i]) / pitch).ceil() as i64)
        .collect();
    let zhi: Vec<i64> = (0..dim)
        .map(|i| ((hi[i] - origin[i]) / pitch).floor() as i64)
        .collect();
    if (0..dim).any(|i| zlo[i] > zhi[i]) {
        return;
    }
    let mut z = zlo.clone();
    let mut x = vec![0.0; dim];
    loop {
        for i in 0..dim {
            x[i] = origin[i] + pitch * z[i] as f64;
        }
        if !f(&x) {
            return;
        }
        let mut d = 0;
        loop {
            if d == dim {
                return;
            }
            z[d] += 1;
            if z[d] <= zhi[d] {
                break;
            }
            z[d] = zlo[d];
            d += 1;
        }
    }
}

/// Packs `region` by disjoint balls of radius at most `delta_max`, aiming for
/// uncovered fraction at most `eta`. Deterministic for fixed inputs and seed.
pub fn pack(
    region: &Region,
    delta_max: f64,
    eta: f64,
    forced: Option<ForcedBalls>,
    seed: u64,
    opts: &PackOptions,
) -> Result<Packing> {
    let dim = region.dim();
    let inradius = region.inradius();
    if !(delta_max > 0.0) || delta_max > inradius * (1.0 + GEOM_REL_TOL) {
        return Err(Error::InvalidParameter(format!(
            "delta_max {delta_max} must lie in (0, inradius {inradius}]"
        )));
    }
    if !(0.0..1.0).contains(&eta) || eta == 0.0 {
        return Err(Error::InvalidParameter(format!("eta {eta} must lie in (0, 1)")));
    }
    let region_vol = region.volume();
    let center = region.center();
    let (bb_lo, bb_hi) = region.bounding_box();

    let mut index = BallIndex::new(dim, delta_max);
    let mut balls: Vec<Ball> = Vec::new();
    let mut covered = 0.0;

    // Stage 1: forced grid of pitch 2*rho, positions ordered by distance from
    // the region center, then lexicographically.
    let mut forced_count = 0;
    if let Some(fb) = forced {
        if fb.radius > delta_max * (1.0 + GEOM_REL_TOL) || fb.radius <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "forced radius {} must lie in (0, delta_max {delta_max}]",
                fb.radius
            )));
        }
        let mut slots: Vec<(u64, Vec<f64>)> = Vec::new();
        lattice_points(
            center.coords().as_slice(),
            2.0 * fb.radius,
            bb_lo.coords().as_slice(),
            bb_hi.coords().as_slice(),
            |x| {
                let p = Point::new(x.to_vec());
                if region.boundary_clearance(&p) >= fb.radius * (1.0 - GEOM_REL_TOL) {
                    let d2 = p.dist(&center);
                    slots.push(((d2 / fb.radius * 1e6) as u64, x.to_vec()));
                }
                true
            },
        );
        slots.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| {
            a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal)
        }));
        if slots.len() < fb.count {
            return Err(Error::InfeasibleForcedCount {
                requested: fb.count,
                radius: fb.radius,
                capacity: slots.len(),
            });
        }
        for (_, x) in slots.into_iter().take(fb.count) {
            let ball = Ball::new(Point::new(x), fb.radius)?;
            index.insert(balls.len(), &ball);
            covered += ball.volume();
            balls.push(ball);
        }
        forced_count = fb.count;
    }

    // Stage 2: seed ball at the region center, then seeded pocket filling.
    // Candidates are uniform uncovered points slid to the center of their
    // local pocket; admission thresholds anneal through delta_max/2^l so
    // large pockets fill first. eta and the caps only truncate the placement
    // sequence, they never alter it.
    let radius_floor = opts.min_radius_rel * inradius;
    let eta_stop = if opts.mc_samples > 0 {
        (eta - 3.0 * (eta * (1.0 - eta) / opts.mc_samples as f64).sqrt()).max(eta * 0.5)
    } else {
        eta
    };
    {
        let c = center.coords().as_slice();
        let b = region.boundary_clearance_slice(c) * (1.0 - GEOM_REL_TOL);
        let r = delta_max.min(b).min(index.free_radius(c, delta_max));
        if r >= radius_floor && balls.len() < opts.max_balls {
            let ball = Ball {
                center: center.clone(),
                radius: r,
            };
            index.insert(balls.len(), &ball);
            covered += ball.volume();
            balls.push(ball);
        }
    }

    let mut rng = derive_rng(seed, streams::PACK_FILL);
    let mut threshold = 0.5 * delta_max;
    let mut fails: u32 = 0;
    // Consecutive sub-threshold candidates tolerated before the admission
    // threshold halves. With F failures the basins of undiscovered pockets
    // above the threshold hold at most ~1/F of the uncovered volume, so each
    // annealing step leaks a bounded fraction of the fill.
    const FAILS_PER_LEVEL: u32 = 512;
    let mut status = FillStatus::MetTolerance;
    let mut uncovered = 1.0 - covered / region_vol;
    let mut x = vec![0.0; dim];
    let mut traced = 0usize;
    while uncovered > eta_stop {
        if balls.len() >= opts.max_balls {
            status = FillStatus::BudgetExceeded;
            break;
        }
        // rejection-sample an uncovered point
        let mut found = false;
        for _ in 0..10_000 {
            sample_in_region(region, &mut rng, &mut x);
            if !index.covers(&x) {
                found = true;
                break;
            }
        }
        if !found {
            status = FillStatus::RadiusFloor;
            break;
        }
        let gate = threshold.max(radius_floor);
        let (adm0, _) = admissible_binding(region, &index, delta_max, &x);
        let r = if adm0 >= 0.125 * gate {
            slide_to_pocket(region, &index, delta_max, 4.0 * threshold, &mut x)
        } else {
            // crack point: the ascent range cannot lift it above the gate
            adm0
        };
        if r >= gate {
            fails = 0;
            let ball = Ball {
                center: Point::new(x.clone()),
                radius: r,
            };
            index.insert(balls.len(), &ball);
            covered += ball.volume();
            balls.push(ball);
            uncovered = 1.0 - covered / region_vol;
            traced += 1;
            if traced >= 20_000 {
                traced = 0;
                if std::env::var_os("WQR_PACK_TRACE").is_some() {
                    eprintln!(
                        "pack balls={} uncovered={uncovered:.4} threshold={threshold:.3e}",
                        balls.len()
                    );
                }
            }
        } else {
            fails += 1;
            if fails >= FAILS_PER_LEVEL {
                fails = 0;
                if threshold <= radius_floor {
                    status = FillStatus::RadiusFloor;
                    break;
                }
                threshold = (0.5 * threshold).max(radius_floor);
            }
        }
    }
    if balls.len() >= opts.max_balls && uncovered > eta_stop {
        status = FillStatus::BudgetExceeded;
    }

    let (est, stderr) = if opts.mc_samples > 0 {
        mc_uncovered(region, &index, opts.mc_samples, seed)
    } else {
        (uncovered.max(0.0), 0.0)
    };

    Ok(Packing {
        region: region.clone(),
        balls,
        forced_count,
        uncovered_fraction_estimate: est,
        uncovered_fraction_stderr: stderr,
        uncovered_exact: uncovered.max(0.0),
        status,
    })
}

/// Unbiased Monte Carlo estimate of |region \ union(balls)| / |region| with
/// its standard error. Deterministic per seed.
pub fn uncovered_fraction(
    region: &Region,
    balls: &[Ball],
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let dim = region.dim();
    for b in balls {
        if b.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: b.dim(),
            });
        }
    }
    let max_r = balls.iter().map(|b| b.radius).fold(0.0, f64::max);
    let mut index = BallIndex::new(dim, max_r.max(1e-30));
    for (i, b) in balls.iter().enumerate() {
        index.insert(i, b);
    }
    Ok(mc_uncovered(region, &index, samples, seed))
}

fn mc_uncovered(region: &Region, index: &BallIndex, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = derive_rng(seed, streams::PACK_MC);
    let dim = region.dim();
    let mut misses = 0usize;
    let mut x = vec![0.0; dim];
    for _ in 0..samples {
        sample_in_region(region, &mut rng, &mut x);
        if !index.covers(&x) {
            misses += 1;
        }
    }
    let p = misses as f64 / samples as f64;
    let stderr = (p * (1.0 - p) / samples as f64).sqrt();
    (p, stderr)
}

/// Uniform sample inside the region, written into `out`.
pub(crate) fn sample_in_region(region: &Region, rng: &mut impl Rng, out: &mut [f64]) {
    match region {
        Region::Box(d) => {
            for i in 0..out.len() {
                out[i] = rng.gen_range(d.lower.0[i]..d.upper.0[i]);
            }
        }
        Region::Ball(b) => sample_in_ball(
            b.center.coords().as_slice(),
            b.radius,
            rng,
            out,
        ),
    }
}

/// Uniform sample in B(center, radius): isotropic direction scaled by U^{1/n}.
pub(crate) fn sample_in_ball(center: &[f64], radius: f64, rng: &mut impl Rng, out: &mut [f64]) {
    let dim = out.len();
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            // Box-Muller pair collapsed to one draw each
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            *v = (-2.0 * u1.ln()).sqrt() * u2.cos();
            norm2 += *v * *v;
        }
        if norm2 > 0.0 {
            let u: f64 = rng.gen_range(0.0f64..1.0);
            let scale = radius * u.powf(1.0 / dim as f64) / norm2.sqrt();
            for (o, c) in out.iter_mut().zip(center) {
                *o = *o * scale + c;
            }
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::BoxDomain;

    fn unit_ball(dim: usize) -> Region {
        Region::Ball(Ball::new(Point::zeros(dim), 1.0).unwrap())
    }

    #[test]
    fn whole_ball_covers_itself() {
        let region = unit_ball(3);
        let balls = vec![Ball::new(Point::zeros(3), 1.0).unwrap()];
        let (est, stderr) = uncovered_fraction(&region, &balls, 10_000, 7).unwrap();
        assert_eq!(est, 0.0);
        assert_eq!(stderr, 0.0);
    }

    #[test]
    fn empty_family_leaves_everything() {
        let region = Region::Box(BoxDomain::unit_cube(3));
        let (est, stderr) = uncovered_fraction(&region, &[], 1000, 1).unwrap();
        assert_eq!(est, 1.0);
        assert_eq!(stderr, 0.0);
    }

    #[test]
    fn inscribed_ball_in_cube_matches_exact_volume() {
        // uncovered = 1 - pi/6 for the inscribed ball of the unit cube
        let region = Region::Box(BoxDomain::unit_cube(3));
        let balls = vec![Ball::new(Point::new(vec![0.5, 0.5, 0.5]), 0.5).unwrap()];
        let (est, stderr) = uncovered_fraction(&region, &balls, 1_000_000, 42).unwrap();
        let exact = 1.0 - std::f64::consts::PI / 6.0;
        assert!(
            (est - exact).abs() <= 3.0 * stderr,
            "est {est} vs exact {exact} (stderr {stderr})"
        );
    }

    #[test]
    fn unit_ball_concentric_seed_and_refinement() {
        let region = unit_ball(3);
        let opts = PackOptions {
            mc_samples: 20_000,
            ..PackOptions::default()
        };
        let p = pack(&region, 0.5, 0.5, None, 0, &opts).unwrap();
        // concentric ball of radius delta_max appears first
        assert!(p.balls[0].center.dist(&Point::zeros(3)) < 1e-12);
        assert!((p.balls[0].radius - 0.5).abs() < 1e-12);
        assert!(p.uncovered_exact <= 0.5, "uncovered {}", p.uncovered_exact);
        assert_eq!(p.status, FillStatus::MetTolerance);
        p.check_invariants(0.5).unwrap();
    }

    #[test]
    fn forced_grid_exact_count() {
        // grid capacity oracle: independent lattice enumeration
        let region = unit_ball(3);
        let rho = 0.18;
        let mut capacity = 0;
        let pitch = 2.0 * rho;
        let m = (1.0 / pitch).floor() as i64 + 1;
        for zx in -m..=m {
            for zy in -m..=m {
                for zz in -m..=m {
                    let x = pitch * zx as f64;
                    let y = pitch * zy as f64;
                    let z = pitch * zz as f64;
                    if (x * x + y * y + z * z).sqrt() + rho <= 1.0 + 1e-12 {
                        capacity += 1;
                    }
                }
            }
        }
        assert!(capacity > 0);
        let opts = PackOptions {
            mc_samples: 0,
            ..PackOptions::default()
        };
        let p = pack(
            &region,
            rho,
            0.9,
            Some(ForcedBalls {
                count: capacity,
                radius: rho,
            }),
            0,
            &opts,
        )
        .unwrap();
        let exact_forced = p
            .balls
            .iter()
            .filter(|b| b.radius == rho)
            .count();
        assert_eq!(p.forced_count, capacity);
        assert_eq!(exact_forced, capacity);
        p.check_invariants(rho).unwrap();

        let err = pack(
            &region,
            rho,
            0.9,
            Some(ForcedBalls {
                count: capacity + 1,
                radius: rho,
            }),
            0,
            &opts,
        );
        match err {
            Err(Error::InfeasibleForcedCount {
                requested,
                capacity: cap,
                ..
            }) => {
                assert_eq!(requested, capacity + 1);
                assert_eq!(cap, capacity);
            }
            other => panic!("expected InfeasibleForcedCount, got {other:?}"),
        }
    }

    #[test]
    fn determinism_and_eta_monotonicity() {
        let region = Region::Box(BoxDomain::unit_cube(3));
        let opts = PackOptions {
            mc_samples: 5_000,
            max_balls: 50_000,
            ..PackOptions::default()
        };
        let a = pack(&region, 0.2, 0.4, None, 5, &opts).unwrap();
        let b = pack(&region, 0.2, 0.4, None, 5, &opts).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let finer = pack(&region, 0.2, 0.2, None, 5, &opts).unwrap();
        assert!(finer.balls.len() >= a.balls.len());
        assert!(finer.uncovered_exact <= a.uncovered_exact);
        // coarser run is a prefix of the finer run
        for (x, y) in a.balls.iter().zip(finer.balls.iter()) {
            assert_eq!(x, y);
        }
    }
}
