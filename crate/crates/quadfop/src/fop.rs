//! The first-occurrence sweep engine.
//!
//! A sweep walks `t = t_start..=B` over one or more polynomial families,
//! factors each value `m(t) = M r²`, and keeps the first `(t, family)`
//! producing each dedup key. Workers fan out over chunks of the range; the
//! final sort on `(key, t, family)` is a total order, so output is identical
//! for any worker count or chunk partition.

use crate::arith;
use crate::quadfield::QuadInt;
use crate::{Error, Result, Sign};
use num_bigint::BigInt;
use rayon::prelude::*;

/// Substitution `T(t)` fed into the quadratic radical polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceRule {
    /// `T = scale·t + offset`
    Linear { scale: u64, offset: i64 },
    /// `T = scale·t^exp + offset`
    Power { scale: u64, exp: u32, offset: i64 },
    /// `T = prime(t)`, the t-th prime
    Prime,
}

impl TraceRule {
    pub fn identity() -> Self {
        TraceRule::Linear { scale: 1, offset: 0 }
    }

    fn value(&self, t: u64, primes: Option<&[u64]>) -> Result<i128> {
        let overflow = || Error::Overflow(format!("trace value at t = {t}"));
        match *self {
            TraceRule::Linear { scale, offset } => (scale as i128)
                .checked_mul(t as i128)
                .and_then(|x| x.checked_add(offset as i128))
                .ok_or_else(overflow),
            TraceRule::Power { scale, exp, offset } => (t as i128)
                .checked_pow(exp)
                .and_then(|x| x.checked_mul(scale as i128))
                .and_then(|x| x.checked_add(offset as i128))
                .ok_or_else(overflow),
            TraceRule::Prime => {
                let primes = primes.expect("prime table prepared for Prime rule");
                Ok(primes[(t - 1) as usize] as i128)
            }
        }
    }

    fn uses_primes(&self) -> bool {
        matches!(self, TraceRule::Prime)
    }
}

/// A parametrized radical family swept by the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyFamily {
    /// `m(T) = T² − 4sν`, element `(T + r√M)/2` of norm `sν`.
    Quadratic { s: Sign, nu: u64, trace: TraceRule },
    /// `m(T) = T² − sν`, element `T + r√M` of norm `sν`.
    Compact { s: Sign, nu: u64, trace: TraceRule },
    /// `m(t) = a²p⁴(kt)² − 2δas`, unit `(1/δ)(a p⁴(kt)² − δs + p²·kt·√m)`
    /// of norm `1`, a local p-th power at `p`.
    LocalPower {
        p: u64,
        a: u64,
        delta: u8,
        t_scale: u64,
        s: Sign,
    },
}

impl PolyFamily {
    /// `m_s(t) = t² − 4s`: the fundamental-unit sweep.
    pub fn units(s: Sign) -> Self {
        PolyFamily::Quadratic {
            s,
            nu: 1,
            trace: TraceRule::identity(),
        }
    }

    /// `m_sν(t) = t² − 4sν`: the norm-equation sweep.
    pub fn norms(s: Sign, nu: u64) -> Self {
        PolyFamily::Quadratic {
            s,
            nu,
            trace: TraceRule::identity(),
        }
    }

    /// `m'_s(t) = t² − s`: the compact radical sweep.
    pub fn compact_units(s: Sign) -> Self {
        PolyFamily::Compact {
            s,
            nu: 1,
            trace: TraceRule::identity(),
        }
    }

    fn uses_primes(&self) -> bool {
        match self {
            PolyFamily::Quadratic { trace, .. } | PolyFamily::Compact { trace, .. } => {
                trace.uses_primes()
            }
            PolyFamily::LocalPower { .. } => false,
        }
    }

    /// Swept radical value `m(t)`.
    pub fn radical_at(&self, t: u64, primes: Option<&[u64]>) -> Result<i128> {
        let overflow = || Error::Overflow(format!("radical value at t = {t}"));
        match self {
            PolyFamily::Quadratic { s, nu, trace } => {
                let tv = trace.value(t, primes)?;
                tv.checked_mul(tv)
                    .and_then(|x| x.checked_sub(4 * s.value() as i128 * *nu as i128))
                    .ok_or_else(overflow)
            }
            PolyFamily::Compact { s, nu, trace } => {
                let tv = trace.value(t, primes)?;
                tv.checked_mul(tv)
                    .and_then(|x| x.checked_sub(s.value() as i128 * *nu as i128))
                    .ok_or_else(overflow)
            }
            PolyFamily::LocalPower { p, a, delta, t_scale, s } => {
                let tau = (*t_scale as i128).checked_mul(t as i128).ok_or_else(overflow)?;
                let amp = (*a as i128)
                    .checked_mul((*p as i128).pow(2))
                    .and_then(|x| x.checked_mul(tau))
                    .ok_or_else(overflow)?;
                // (a p² τ)² / a = a p⁴ τ², then m = a·(a p⁴ τ²) − 2δas
                amp.checked_mul(amp)
                    .and_then(|x| x.checked_sub(2 * *delta as i128 * *a as i128 * s.value() as i128))
                    .ok_or_else(overflow)
            }
        }
    }

    /// Trace of the constructed element: the substitution value `T` for the
    /// quadratic kinds, the unit trace for local-power families.
    pub fn trace_at(&self, t: u64, primes: Option<&[u64]>) -> Result<i128> {
        match self {
            PolyFamily::Quadratic { trace, .. } | PolyFamily::Compact { trace, .. } => {
                trace.value(t, primes)
            }
            PolyFamily::LocalPower { p, a, delta, t_scale, s } => {
                let overflow = || Error::Overflow(format!("trace at t = {t}"));
                let tau = (*t_scale as i128).checked_mul(t as i128).ok_or_else(overflow)?;
                let tau2 = tau.checked_mul(tau).ok_or_else(overflow)?;
                let ap4t2 = (*a as i128)
                    .checked_mul((*p as i128).pow(4))
                    .and_then(|x| x.checked_mul(tau2))
                    .ok_or_else(overflow)?;
                let d = *delta as i128;
                Ok((2 / d) * (ap4t2 - d * s.value() as i128))
            }
        }
    }

    /// Norm of the constructed element.
    pub fn element_norm(&self) -> i64 {
        match self {
            PolyFamily::Quadratic { s, nu, .. } | PolyFamily::Compact { s, nu, .. } => {
                s.value() * *nu as i64
            }
            PolyFamily::LocalPower { .. } => 1,
        }
    }

    /// The constructed quadratic integer for a record `(t, M, r)`.
    pub fn element(&self, t: u64, radical: &BigInt, r: u64, primes: Option<&[u64]>) -> Result<QuadInt> {
        match self {
            PolyFamily::Quadratic { trace, .. } => {
                let tv = trace.value(t, primes)?;
                QuadInt::new(radical.clone(), BigInt::from(tv), BigInt::from(r))
            }
            PolyFamily::Compact { trace, .. } => {
                let tv = trace.value(t, primes)?;
                QuadInt::new(radical.clone(), BigInt::from(2 * tv), BigInt::from(2 * r))
            }
            PolyFamily::LocalPower { p, a, delta, t_scale, s } => {
                let tau = BigInt::from(*t_scale) * t;
                let p2 = BigInt::from(*p) * *p;
                let ap4t2 = BigInt::from(*a) * &p2 * &p2 * &tau * &tau;
                let d = *delta as i64;
                let u = (ap4t2 - BigInt::from(d * s.value())) * (2 / d);
                let v = &p2 * &tau * r * (2 / d);
                QuadInt::new(radical.clone(), u, v)
            }
        }
    }
}

/// Dedup and sort key for a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DedupKey {
    Radical,
    Discriminant,
}

impl DedupKey {
    pub fn key_of(self, radical: i128) -> i128 {
        match self {
            DedupKey::Radical => radical,
            DedupKey::Discriminant => {
                if radical == 0 || radical == 1 {
                    radical
                } else if radical.rem_euclid(4) == 1 {
                    radical
                } else {
                    4 * radical
                }
            }
        }
    }
}

/// One first-occurrence record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FopRecord {
    /// Sort/dedup key: the radical, or its field discriminant.
    pub key: i128,
    /// Square-free part `M` of the swept value (sign retained; 0 and 1 mark
    /// degenerate values).
    pub radical: i128,
    /// Cofactor with `m(t) = M r²`.
    pub r: u64,
    /// Minimal sweep parameter producing this key.
    pub t: u64,
    /// Trace substitution value at `t` (see [`PolyFamily::trace_at`]).
    pub trace: i128,
    /// Index of the producing family in the swept list.
    pub family: u32,
}

impl FopRecord {
    /// Radicals below 2 do not define a real quadratic field.
    pub fn is_degenerate(&self) -> bool {
        self.radical < 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunStats {
    pub t_start: u64,
    pub bound: u64,
    pub sweep_points: u64,
    pub distinct: u64,
    pub gap: u64,
    pub max_key: i128,
}

#[derive(Clone, Debug)]
pub struct FopRun {
    pub records: Vec<FopRecord>,
    pub stats: RunStats,
}

/// Sweep a single family over `t = 1..=bound`.
pub fn run_fop(family: &PolyFamily, bound: u64, key: DedupKey) -> Result<FopRun> {
    run_fop_range(std::slice::from_ref(family), 1, bound, key)
}

/// Sweep several families together over `t = 1..=bound`; at each `t` the
/// families are visited in list order.
pub fn run_fop_multi(families: &[PolyFamily], bound: u64, key: DedupKey) -> Result<FopRun> {
    run_fop_range(families, 1, bound, key)
}

/// Sweep over `t = t_start..=bound`.
pub fn run_fop_range(
    families: &[PolyFamily],
    t_start: u64,
    bound: u64,
    key: DedupKey,
) -> Result<FopRun> {
    if families.is_empty() {
        return Err(Error::Invalid("no families to sweep".into()));
    }
    if t_start < 1 || bound < t_start {
        return Err(Error::Invalid(format!(
            "bad sweep range [{t_start}, {bound}]"
        )));
    }
    let primes = if families.iter().any(PolyFamily::uses_primes) {
        Some(arith::first_primes(bound))
    } else {
        None
    };
    let primes_ref = primes.as_deref();

    const CHUNK: u64 = 4096;
    let starts: Vec<u64> = (t_start..=bound).step_by(CHUNK as usize).collect();
    let chunks: Vec<Vec<FopRecord>> = starts
        .par_iter()
        .map(|&c0| {
            let c1 = (c0 + CHUNK - 1).min(bound);
            let mut out = Vec::with_capacity(((c1 - c0 + 1) as usize) * families.len());
            for t in c0..=c1 {
                for (fi, fam) in families.iter().enumerate() {
                    let m = fam.radical_at(t, primes_ref)?;
                    let (radical, r) = if m == 0 {
                        (0i128, 1u64)
                    } else {
                        let core = arith::squarefree_core(m)?;
                        (core.core, core.r)
                    };
                    out.push(FopRecord {
                        key: key.key_of(radical),
                        radical,
                        r,
                        t,
                        trace: fam.trace_at(t, primes_ref)?,
                        family: fi as u32,
                    });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut hits: Vec<FopRecord> = chunks.into_iter().flatten().collect();
    let sweep_points = hits.len() as u64;
    hits.sort_unstable_by_key(|h| (h.key, h.t, h.family));
    hits.dedup_by_key(|h| h.key);

    let distinct = hits.len() as u64;
    let stats = RunStats {
        t_start,
        bound,
        sweep_points,
        distinct,
        gap: sweep_points - distinct,
        max_key: hits.last().map_or(0, |h| h.key),
    };
    Ok(FopRun { records: hits, stats })
}

/// Gap statistics `Δ = #sweep points − #records` and the fitted exponent
/// `log Δ / log B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapStats {
    pub n: u64,
    pub delta: u64,
    pub exponent: Option<f64>,
}

pub fn gap_stats(run: &FopRun) -> GapStats {
    let delta = run.stats.gap;
    let exponent = (delta > 0 && run.stats.bound > 1)
        .then(|| (delta as f64).ln() / (run.stats.bound as f64).ln());
    GapStats {
        n: run.stats.distinct,
        delta,
        exponent,
    }
}

/// First-occurrence merge of arbitrary keyed hits: keeps the earliest hit
/// per key (input order is the sweep order) and returns them sorted by key.
pub fn first_occurrence_merge<K: Ord, P>(mut hits: Vec<(K, P)>) -> Vec<(K, P)> {
    hits.sort_by(|a, b| a.0.cmp(&b.0));
    hits.dedup_by(|later, first| later.0 == first.0);
    hits
}
