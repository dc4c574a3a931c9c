//! Synthetic random fields with certified weak-dependence envelopes.
//!
//! Every model is centered, bounded, and driven by Rademacher signs so that
//! small instances can be enumerated exactly: a realization is a pure
//! function of (model, box, seed) through a counter-based hash, and the full
//! outcome space of B noise bits is just the 2^B sign assignments.

use crate::bounds::{Decay, DecayModel, PNorm};
use crate::error::{Error, Result};
use crate::lattice::{Point, Rectangle};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based Rademacher sign for one noise site: a pure hash of
/// (seed, coordinates), independent of evaluation order and thread count.
fn site_sign(seed: u64, site: &[i64]) -> f64 {
    let mut h = splitmix64(seed);
    for &c in site {
        h = splitmix64(h ^ (c as u64));
    }
    if h >> 63 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Stream derivation for replicated sampling: replicate j of master seed s
/// draws its signs from `derive_seed(s, j)`.
pub fn derive_seed(master: u64, replicate: u64) -> u64 {
    splitmix64(master ^ splitmix64(replicate.wrapping_mul(GOLDEN) ^ 0x5851_f42d_4c95_7f2d))
}

fn kernel_offsets(dim: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let span = (hi - lo + 1) as usize;
    let mut out = Vec::with_capacity(span.pow(dim as u32));
    let mut cursor = vec![lo; dim];
    'outer: loop {
        out.push(cursor.clone());
        for i in (0..dim).rev() {
            cursor[i] += 1;
            if cursor[i] <= hi {
                continue 'outer;
            }
            cursor[i] = lo;
            if i == 0 {
                break 'outer;
            }
        }
    }
    out
}

fn l2_normalize(weights: &mut [f64]) -> Result<()> {
    let norm2: f64 = weights.iter().map(|a| a * a).sum();
    if norm2 <= 0.0 || norm2.is_nan() {
        return Err(Error::InvalidModel("kernel has zero l2 norm".into()));
    }
    let norm = norm2.sqrt();
    for w in weights {
        *w /= norm;
    }
    Ok(())
}

/// A samplable, exactly enumerable random field on N^d (zero-extended to
/// Z^d where the kernels reach below the origin).
#[derive(Clone, Debug)]
pub enum FieldModel {
    /// Independent signs, one per site.
    IidRademacher { dim: usize },
    /// One shared sign of magnitude `side^-alpha` spread over the cube
    /// `[side]_0^d`, zero outside; the extremal witness for polynomial decay.
    BlockRademacher { dim: usize, side: u64, alpha: f64 },
    /// `X_t = sum_{|s|_inf <= radius} a_s eps_{t+s}` with `sum a_s^2 = 1`.
    /// Offsets are precomputed row-major over `[-radius, radius]^d`.
    MovingAverage {
        dim: usize,
        radius: u64,
        weights: Vec<f64>,
        offsets: Vec<Vec<i64>>,
    },
    /// One-sided kernel `a_s = (1 + |s|_inf)^-beta` over `0 <=_cw s`,
    /// `|s|_inf <= trunc`, l2-normalized: `X_t = sum_s a_s eps_{t-s}`.
    CausalLinear {
        dim: usize,
        beta: f64,
        trunc: u64,
        weights: Vec<f64>,
        offsets: Vec<Vec<i64>>,
    },
    /// The wrapped model inside `window`, identically zero outside.
    Padded {
        inner: Box<FieldModel>,
        window: Rectangle,
    },
}

impl FieldModel {
    pub fn iid(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("dimension must be positive".into()));
        }
        Ok(FieldModel::IidRademacher { dim })
    }

    pub fn block(dim: usize, side: u64, alpha: f64) -> Result<Self> {
        if dim == 0 || side == 0 || alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "block field needs dim >= 1, side >= 1, alpha > 0; got dim={dim} side={side} alpha={alpha}"
            )));
        }
        Ok(FieldModel::BlockRademacher { dim, side, alpha })
    }

    /// Moving average with explicit kernel weights over the offsets
    /// `[-radius, radius]^d` in row-major order; the kernel is l2-normalized.
    pub fn moving_average(dim: usize, radius: u64, mut weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("dimension must be positive".into()));
        }
        let span = (2 * radius + 1).pow(dim as u32) as usize;
        if weights.len() != span {
            return Err(Error::InvalidModel(format!(
                "kernel needs {span} weights, got {}",
                weights.len()
            )));
        }
        l2_normalize(&mut weights)?;
        let offsets = kernel_offsets(dim, -(radius as i64), radius as i64);
        Ok(FieldModel::MovingAverage {
            dim,
            radius,
            weights,
            offsets,
        })
    }

    /// Moving average with a uniform kernel.
    pub fn uniform_moving_average(dim: usize, radius: u64) -> Result<Self> {
        let span = (2 * radius + 1).pow(dim as u32) as usize;
        Self::moving_average(dim, radius, vec![1.0; span])
    }

    pub fn causal_linear(dim: usize, beta: f64, trunc: u64) -> Result<Self> {
        if dim == 0 || beta.is_nan() || beta <= 0.0 {
            return Err(Error::InvalidModel(format!(
                "causal field needs dim >= 1 and beta > 0; got dim={dim} beta={beta}"
            )));
        }
        let offsets = kernel_offsets(dim, 0, trunc as i64);
        let mut weights: Vec<f64> = offsets
            .iter()
            .map(|s| {
                let norm = s.iter().copied().max().unwrap_or(0) as f64;
                (1.0 + norm).powf(-beta)
            })
            .collect();
        l2_normalize(&mut weights)?;
        Ok(FieldModel::CausalLinear {
            dim,
            beta,
            trunc,
            weights,
            offsets,
        })
    }

    /// Zero-pad outside a finite window; the envelope is unchanged because
    /// conditioning on a function of the field can only shrink coefficients.
    pub fn pad_zero(self, window: Rectangle) -> Result<FieldModel> {
        if window.dim() != self.dim() {
            return Err(Error::DimensionMismatch(window.dim(), self.dim()));
        }
        Ok(FieldModel::Padded {
            inner: Box::new(self),
            window,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            FieldModel::IidRademacher { dim }
            | FieldModel::BlockRademacher { dim, .. }
            | FieldModel::MovingAverage { dim, .. }
            | FieldModel::CausalLinear { dim, .. } => *dim,
            FieldModel::Padded { inner, .. } => inner.dim(),
        }
    }

    /// Noise sites that the field values on `window` depend on.
    pub fn noise_sites(&self, window: &Rectangle) -> Vec<Vec<i64>> {
        match self {
            FieldModel::IidRademacher { .. } => window
                .points()
                .map(|p| p.coords().iter().map(|&c| c as i64).collect())
                .collect(),
            FieldModel::BlockRademacher { dim, .. } => vec![vec![0; *dim]],
            FieldModel::MovingAverage { radius, .. } => {
                let r = *radius as i64;
                enumerate_box(
                    &window
                        .sides()
                        .iter()
                        .map(|&n| (-r, n as i64 - 1 + r))
                        .collect::<Vec<_>>(),
                )
            }
            FieldModel::CausalLinear { trunc, .. } => {
                let l = *trunc as i64;
                enumerate_box(
                    &window
                        .sides()
                        .iter()
                        .map(|&n| (-l, n as i64 - 1))
                        .collect::<Vec<_>>(),
                )
            }
            FieldModel::Padded { inner, window: pad } => {
                let clipped: Vec<u64> = window
                    .sides()
                    .iter()
                    .zip(pad.sides())
                    .map(|(&a, &b)| a.min(b))
                    .collect();
                match Rectangle::new(clipped) {
                    Ok(r) => inner.noise_sites(&r),
                    Err(_) => Vec::new(),
                }
            }
        }
    }

    /// Field value at `t` given a sign oracle for the noise sites.
    fn value_with(&self, t: &[i64], sign: &dyn Fn(&[i64]) -> f64) -> f64 {
        match self {
            FieldModel::IidRademacher { .. } => {
                if t.iter().any(|&c| c < 0) {
                    0.0
                } else {
                    sign(t)
                }
            }
            FieldModel::BlockRademacher { dim, side, alpha } => {
                let inside = t.iter().all(|&c| c >= 0 && (c as u64) < *side);
                if inside {
                    (*side as f64).powf(-alpha) * sign(&vec![0i64; *dim])
                } else {
                    0.0
                }
            }
            FieldModel::MovingAverage {
                dim,
                weights,
                offsets,
                ..
            } => {
                if t.iter().any(|&c| c < 0) {
                    return 0.0;
                }
                let mut site = vec![0i64; *dim];
                let mut acc = 0.0;
                for (s, a) in offsets.iter().zip(weights) {
                    for (dst, (&c, &o)) in site.iter_mut().zip(t.iter().zip(s)) {
                        *dst = c + o;
                    }
                    acc += a * sign(&site);
                }
                acc
            }
            FieldModel::CausalLinear {
                dim,
                weights,
                offsets,
                ..
            } => {
                if t.iter().any(|&c| c < 0) {
                    return 0.0;
                }
                let mut site = vec![0i64; *dim];
                let mut acc = 0.0;
                for (s, a) in offsets.iter().zip(weights) {
                    for (dst, (&c, &o)) in site.iter_mut().zip(t.iter().zip(s)) {
                        *dst = c - o;
                    }
                    acc += a * sign(&site);
                }
                acc
            }
            FieldModel::Padded { inner, window } => {
                let inside = t.len() == window.dim()
                    && t.iter()
                        .zip(window.sides())
                        .all(|(&c, &n)| c >= 0 && (c as u64) < n);
                if inside {
                    inner.value_with(t, sign)
                } else {
                    0.0
                }
            }
        }
    }

    /// One seeded realization over a box; deterministic in (model, R, seed).
    pub fn sample(&self, rect: &Rectangle, seed: u64) -> Result<SampleGrid> {
        if rect.dim() != self.dim() {
            return Err(Error::DimensionMismatch(rect.dim(), self.dim()));
        }
        let sign = move |site: &[i64]| site_sign(seed, site);
        let values = rect
            .points()
            .map(|p| {
                let t: Vec<i64> = p.coords().iter().map(|&c| c as i64).collect();
                self.value_with(&t, &sign)
            })
            .collect();
        Ok(SampleGrid {
            rect: rect.clone(),
            values,
        })
    }

    /// Certified envelope: the exact coefficient at every lag r is bounded
    /// by `M_p * phi(r)` of the returned model.
    ///
    /// - iid: finite range 0, `M_p = 1`.
    /// - block: `phi(r) = min(1, r^-alpha)`, `M_p = 1`.
    /// - moving average of radius w: finite range 2w (disjoint noise windows
    ///   beyond that); `M_2 = 1`, `M_p = sqrt(p)` for p > 2, `M_inf = sum |a_s|`.
    /// - causal kernel: conditioning reveals at most the noise tail
    ///   `{ s : |s|_inf >= r }`, so the lag-r coefficient is at most the
    ///   kernel l2 tail (times `sqrt(p)` for p > 2, l1 tail ratio at p = inf);
    ///   the smallest polynomial `min(1, c r^-beta)` dominating that tail is
    ///   computed from the kernel itself.
    pub fn wd_envelope(&self, p: PNorm) -> DecayModel {
        match self {
            FieldModel::IidRademacher { .. } => {
                DecayModel::new(Decay::FiniteRange { width: 0 }, 1.0, p).expect("valid")
            }
            FieldModel::BlockRademacher { alpha, .. } => DecayModel::new(
                Decay::Polynomial {
                    c: 1.0,
                    alpha: *alpha,
                },
                1.0,
                p,
            )
            .expect("valid"),
            FieldModel::MovingAverage {
                radius, weights, ..
            } => {
                let m_p = match p {
                    PNorm::Finite(q) if q > 2.0 => q.sqrt(),
                    PNorm::Finite(_) => 1.0,
                    PNorm::Infinity => weights.iter().map(|a| a.abs()).sum(),
                };
                DecayModel::new(Decay::FiniteRange { width: 2 * radius }, m_p, p).expect("valid")
            }
            FieldModel::CausalLinear {
                beta,
                trunc,
                weights,
                offsets,
                ..
            } => {
                let tail = |r: u64, one_norm: bool| -> f64 {
                    let acc: f64 = offsets
                        .iter()
                        .zip(weights)
                        .filter(|(s, _)| s.iter().copied().max().unwrap_or(0) as u64 >= r)
                        .map(|(_, a)| if one_norm { a.abs() } else { a * a })
                        .sum();
                    if one_norm {
                        acc
                    } else {
                        acc.sqrt()
                    }
                };
                let (m_p, one_norm) = match p {
                    PNorm::Finite(q) if q > 2.0 => (q.sqrt(), false),
                    PNorm::Finite(_) => (1.0, false),
                    PNorm::Infinity => (weights.iter().map(|a| a.abs()).sum(), true),
                };
                let total = if one_norm { tail(0, true) } else { 1.0 };
                let mut c: f64 = 1.0;
                for r in 1..=*trunc {
                    let ratio = tail(r, one_norm) / total;
                    c = c.max(ratio * (r as f64).powf(*beta));
                }
                DecayModel::new(Decay::Polynomial { c, alpha: *beta }, m_p, p).expect("valid")
            }
            FieldModel::Padded { inner, .. } => inner.wd_envelope(p),
        }
    }

    /// Enumerate the full outcome space of the field restricted to `window`.
    pub fn enumerate_universe(&self, window: &Rectangle, cap: u32) -> Result<Universe> {
        if window.dim() != self.dim() {
            return Err(Error::DimensionMismatch(window.dim(), self.dim()));
        }
        let sites = self.noise_sites(window);
        let bits = sites.len() as u32;
        if bits > cap {
            return Err(Error::UniverseTooLarge {
                required: bits,
                cap,
            });
        }
        let points: Vec<Point> = window.points().collect();
        let index: std::collections::HashMap<Vec<i64>, usize> = sites
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let outcomes = 1usize << bits;
        let mut values = vec![0.0f64; outcomes * points.len()];
        for outcome in 0..outcomes {
            let sign = |site: &[i64]| -> f64 {
                match index.get(site) {
                    Some(&i) => {
                        if (outcome >> i) & 1 == 1 {
                            1.0
                        } else {
                            -1.0
                        }
                    }
                    // untouched sites can only be zero-padding territory
                    None => 0.0,
                }
            };
            for (j, p) in points.iter().enumerate() {
                let t: Vec<i64> = p.coords().iter().map(|&c| c as i64).collect();
                values[outcome * points.len() + j] = self.value_with(&t, &sign);
            }
        }
        Ok(Universe {
            window: window.clone(),
            points,
            n_bits: bits,
            values,
        })
    }
}

fn enumerate_box(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cursor: Vec<i64> = ranges.iter().map(|&(lo, _)| lo).collect();
    'outer: loop {
        out.push(cursor.clone());
        for i in (0..cursor.len()).rev() {
            cursor[i] += 1;
            if cursor[i] <= ranges[i].1 {
                continue 'outer;
            }
            cursor[i] = ranges[i].0;
            if i == 0 {
                break 'outer;
            }
        }
    }
    out
}

/// One realization of a field over a box, row-major.
#[derive(Clone, Debug)]
pub struct SampleGrid {
    pub rect: Rectangle,
    pub values: Vec<f64>,
}

impl SampleGrid {
    /// Centered partial sum; every shipped model has mean zero.
    pub fn sum(&self) -> f64 {
        crate::mc::pairwise_sum(&self.values)
    }
}

/// The complete finite outcome space of a field on a window: 2^B equally
/// likely sign assignments tabulated against every window point.
#[derive(Clone)]
pub struct Universe {
    window: Rectangle,
    points: Vec<Point>,
    n_bits: u32,
    values: Vec<f64>,
}

impl Universe {
    pub fn window(&self) -> &Rectangle {
        &self.window
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn outcomes(&self) -> usize {
        1usize << self.n_bits
    }

    pub fn noise_bits(&self) -> u32 {
        self.n_bits
    }

    /// Uniform probability of a single outcome.
    pub fn prob(&self) -> f64 {
        1.0 / self.outcomes() as f64
    }

    pub fn point_index(&self, p: &Point) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    pub fn value(&self, outcome: usize, point_idx: usize) -> f64 {
        self.values[outcome * self.points.len() + point_idx]
    }

    /// Per-outcome column of field values at one point.
    pub fn field_column(&self, p: &Point) -> Result<Vec<f64>> {
        let idx = self
            .point_index(p)
            .ok_or_else(|| Error::UntabulatedSite(p.to_string()))?;
        Ok((0..self.outcomes()).map(|o| self.value(o, idx)).collect())
    }

    pub fn mean(&self, target: &[f64]) -> f64 {
        crate::mc::pairwise_sum(target) / self.outcomes() as f64
    }

    /// `|target - mean|_p` over the uniform outcome space.
    pub fn lp_norm(&self, target: &[f64], p: PNorm) -> f64 {
        let mean = self.mean(target);
        match p {
            PNorm::Infinity => target.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max),
            PNorm::Finite(q) => {
                let moments: Vec<f64> = target.iter().map(|v| (v - mean).abs().powf(q)).collect();
                (crate::mc::pairwise_sum(&moments) / self.outcomes() as f64).powf(1.0 / q)
            }
        }
    }
}
