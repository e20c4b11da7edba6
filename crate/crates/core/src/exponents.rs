//! Closed-form exponents and the minimization producing s_1(k) and the
//! G-tilde table.
//!
//! Everything here is exact rational arithmetic; floating point is forbidden
//! in this module because the G-tilde column is floor(s_1)+1 and therefore
//! floor-sensitive.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::VinogradovParams;
use crate::rational::{floor_int, rat_int, rat_u, Rat};

/// Which theorem or bound family produced an exponent value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "thm1.1")]
    Thm11,
    #[serde(rename = "thm1.2-i")]
    Thm12CaseI,
    #[serde(rename = "thm1.2-ii")]
    Thm12CaseII,
    #[serde(rename = "family-9.3")]
    Family93,
    #[serde(rename = "family-9.4")]
    Family94,
    /// Convex-envelope interpolation between kappa anchor points. Only
    /// produced in `EtaMode::Envelope`; never used for the published tables.
    #[serde(rename = "envelope")]
    Envelope,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Thm11 => "thm1.1",
            Provenance::Thm12CaseI => "thm1.2-i",
            Provenance::Thm12CaseII => "thm1.2-ii",
            Provenance::Family93 => "family-9.3",
            Provenance::Family94 => "family-9.4",
            Provenance::Envelope => "envelope",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaCase {
    #[serde(rename = "i")]
    I,
    #[serde(rename = "ii")]
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EtaMode {
    #[default]
    #[serde(rename = "paper-families")]
    PaperFamilies,
    #[serde(rename = "envelope")]
    Envelope,
}

/// An upper bound for the mean-value exponent defect eta(s, k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaBound {
    pub s: u64,
    pub k: u32,
    pub value: Rat,
    pub provenance: Provenance,
}

/// Result of the s_1(k) grid minimization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct S1Result {
    pub k: u32,
    pub value: Rat,
    pub argmin_m: u32,
    pub argmin_w: u32,
    pub argmin_family: Provenance,
    pub argmin_v: u64,
    pub gtilde: u64,
}

/// kappa(r, t, k) = r(t+1) - (1/2)(t+r-k)(t+r-k-1 + (2r-2)/(t-1)).
pub fn kappa(params: &VinogradovParams) -> Result<Rat> {
    params.validate()?;
    let (k, r, t) = (params.k as i64, params.r as i64, params.t as i64);
    let e = rat_int(t + r - k);
    let inner = rat_int(t + r - k - 1) + rat_int(2 * r - 2) / rat_int(t - 1);
    Ok(rat_int(r * (t + 1)) - e * inner / rat_int(2))
}

/// The congruencing-loss coefficients (mu, nu) of the auxiliary systems.
/// Both are integers whenever r + t >= k.
pub fn mu_nu(params: &VinogradovParams) -> Result<(u64, u64)> {
    params.validate()?;
    let (k, r, t) = (params.k as i64, params.r as i64, params.t as i64);
    let e = t + r - k;
    let two_mu = e * (e - 1);
    let two_nu = e * (k + r - t - 1);
    debug_assert!(two_mu % 2 == 0);
    // e + (k+r-t-1) = 2r-1 is odd, so exactly one factor of two_nu is even.
    debug_assert!(two_nu % 2 == 0);
    Ok(((two_mu / 2) as u64, (two_nu / 2) as u64))
}

/// delta_{k,m} together with the s-threshold above which it applies.
/// Case i: (m^2, (k-m)^2 + (k-m)) for 2m <= k.
/// Case ii: (m^2 + m + m/(k-m-1), (k-m)^2 - 1) for 2m <= k-1.
pub fn delta(k: u32, m: u32, case: DeltaCase) -> Result<(Rat, u64)> {
    let (k64, m64) = (k as i64, m as i64);
    match case {
        DeltaCase::I => {
            if 2 * m64 > k64 {
                return Err(Error::invalid(format!("case i requires 2m <= k, got m={m}, k={k}")));
            }
            let d = k64 - m64;
            Ok((rat_int(m64 * m64), (d * d + d) as u64))
        }
        DeltaCase::II => {
            if 2 * m64 > k64 - 1 {
                return Err(Error::invalid(format!(
                    "case ii requires 2m <= k-1, got m={m}, k={k}"
                )));
            }
            if k64 - m64 - 1 == 0 {
                return Err(Error::invalid("case ii requires k-m-1 > 0".to_string()));
            }
            let d = k64 - m64;
            let val = rat_int(m64 * m64 + m64) + rat_int(m64) / rat_int(k64 - m64 - 1);
            Ok((val, (d * d - 1) as u64))
        }
    }
}

/// Best assembled upper bound for eta(s, k) across the known bound families.
///
/// The thm1.1 bound is monotone-extended: a bound established at some
/// s' <= s remains valid at s because J_{s+1} <= X^2 J_s, so beyond its
/// stated range we keep the value at the range edge instead of falling
/// back to the trivial bound. This keeps the assembly non-increasing in s.
pub fn eta_known(s: u64, k: u32, mode: EtaMode) -> Result<EtaBound> {
    if s < 1 {
        return Err(Error::invalid("eta_known requires s >= 1"));
    }
    if k < 2 {
        return Err(Error::invalid("eta_known requires k >= 2"));
    }
    let k64 = k as i64;
    let kk1_half = rat_int(k64 * (k64 + 1) / 2);

    let mut best: Option<(Rat, Provenance)> = None;
    let mut consider = |value: Rat, prov: Provenance| {
        let value = if value.is_negative() { Rat::zero() } else { value };
        match &best {
            Some((v, _)) if *v <= value => {}
            _ => best = Some((value, prov)),
        }
    };

    // thm1.1: eta <= k(k+1)/2 - s for s <= floor((k+1)^2/4), with the
    // monotone extension beyond that range.
    let thm11_edge = ((k64 + 1) * (k64 + 1) / 4) as u64;
    let s_eff = s.min(thm11_edge).max(1);
    consider(kk1_half.clone() - rat_u(s_eff), Provenance::Thm11);

    // thm1.2: smallest m whose threshold is met gives the best value
    // (delta_{k,m} grows with m).
    for m in 0..=(k / 2) {
        if let Ok((val, thr)) = delta(k, m, DeltaCase::I) {
            if s >= thr {
                consider(val, Provenance::Thm12CaseI);
                break;
            }
        }
    }
    for m in 0..=((k.saturating_sub(1)) / 2) {
        if let Ok((val, thr)) = delta(k, m, DeltaCase::II) {
            if s >= thr {
                consider(val, Provenance::Thm12CaseII);
                break;
            }
        }
    }

    if mode == EtaMode::Envelope {
        if let Some(env) = KappaEnvelope::for_k(k).evaluate(s) {
            consider(env, Provenance::Envelope);
        }
    }

    let (value, provenance) = best.expect("thm1.1 candidate always present");
    Ok(EtaBound { s, k, value, provenance })
}

/// Lower convex envelope of the anchor points (r(t+1), k(k+1)/2 - kappa)
/// supplied by kappa over all admissible (r, t). Holder convexity of
/// the exponents justifies linear interpolation in s, and the trivial
/// variable-padding argument justifies the flat extension to the right.
pub struct KappaEnvelope {
    /// Lower hull vertices, sorted by s, strictly decreasing in value until
    /// the minimum.
    hull: Vec<(u64, Rat)>,
}

impl KappaEnvelope {
    pub fn for_k(k: u32) -> Self {
        let k64 = k as i64;
        let kk1_half = rat_int(k64 * (k64 + 1) / 2);
        let mut pts: Vec<(u64, Rat)> = Vec::new();
        for p in VinogradovParams::all_for_k(k) {
            if p.t < 2 {
                continue;
            }
            let s_anchor = p.r as u64 * (p.t as u64 + 1);
            let kap = kappa(&p).expect("admissible");
            let eta = kk1_half.clone() - kap;
            let eta = if eta.is_negative() { Rat::zero() } else { eta };
            pts.push((s_anchor, eta));
        }
        pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        // Keep only the best value per abscissa.
        pts.dedup_by(|next, prev| next.0 == prev.0);
        // Monotone-chain lower hull.
        let mut hull: Vec<(u64, Rat)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let a = &hull[hull.len() - 2];
                let b = &hull[hull.len() - 1];
                // cross((b-a), (p-b)) <= 0 means b is above the chord a-p.
                let cross = rat_u(b.0 - a.0) * (p.1.clone() - b.1.clone())
                    - (b.1.clone() - a.1.clone()) * rat_u(p.0 - b.0);
                if cross <= Rat::zero() {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        KappaEnvelope { hull }
    }

    /// Envelope value at s, or None when s precedes every anchor.
    pub fn evaluate(&self, s: u64) -> Option<Rat> {
        let first = self.hull.first()?;
        if s < first.0 {
            return None;
        }
        let last = self.hull.last().expect("nonempty");
        if s >= last.0 {
            // Flat extension; the hull minimum is its last vertex only if the
            // hull is non-increasing, so take the running minimum explicitly.
            return self.hull.iter().map(|(_, v)| v.clone()).min();
        }
        let i = self.hull.partition_point(|(sa, _)| *sa <= s);
        let (s0, v0) = &self.hull[i - 1];
        let (s1, v1) = &self.hull[i];
        let lerp = v0.clone()
            + (v1.clone() - v0.clone()) * rat_u(s - s0) / rat_u(s1 - s0);
        // Bounds established at smaller s still apply at s.
        let run_min = self.hull[..i].iter().map(|(_, v)| v.clone()).min().unwrap();
        Some(lerp.min(run_min))
    }
}

/// Delta*_v = max{eta(v,k) - 1, eta(v,k-1)}, with the two bound families at
/// their special arguments v = (k-m)^2 + (k-m) and v = (k-m)^2 - 1.
pub fn delta_star(v: u64, k: u32, mode: EtaMode) -> Result<Rat> {
    if v < 1 {
        return Err(Error::invalid("delta_star requires v >= 1"));
    }
    if k < 3 {
        return Err(Error::invalid("delta_star requires k >= 3"));
    }
    if mode == EtaMode::PaperFamilies {
        if let Some((val, _m, _fam)) = family_delta_star(v, k) {
            return Ok(val);
        }
    }
    let a = eta_known(v, k, mode)?.value - Rat::one();
    let b = eta_known(v, k - 1, mode)?.value;
    Ok(a.max(b).max(Rat::zero()))
}

/// If v has one of the two special forms, the family value of Delta*_v
/// together with the m and family tag. The family-9.3 value is preferred
/// when both match.
pub fn family_delta_star(v: u64, k: u32) -> Option<(Rat, u32, Provenance)> {
    for m in 1..=(k / 2) {
        let d = (k - m) as u64;
        if v == d * d + d {
            let val = rat_int((m as i64) * (m as i64) - 1);
            return Some((val, m, Provenance::Family93));
        }
    }
    for m in 1..=(k.saturating_sub(1) / 2) {
        let d = (k - m) as u64;
        if v == d * d - 1 {
            let m64 = m as i64;
            let val = rat_int(m64 * m64 + m64 - 1) + rat_int(m64) / rat_int((k - m - 1) as i64);
            return Some((val, m, Provenance::Family94));
        }
    }
    None
}

fn s0_with_delta(k: u32, v: u64, w: u32, delta_star_v: &Rat) -> Result<Rat> {
    let k64 = k as i64;
    if w < 1 || w as i64 > k64 - 1 {
        return Err(Error::invalid(format!("w = {w} must satisfy 1 <= w <= k-1")));
    }
    if v < 1 {
        return Err(Error::invalid("s0 requires v >= 1"));
    }
    let lhs = 2 * v as i128 + (w as i128) * (w as i128) - w as i128;
    let cap = 2 * (k64 as i128) * (k64 as i128) - 2;
    if lhs >= cap {
        return Err(Error::invalid(format!(
            "s0 requires 2v + w^2 - w = {lhs} < 2k^2 - 2 = {cap}"
        )));
    }
    debug_assert!(!delta_star_v.is_negative());
    let gap = rat_int((cap - lhs) as i64);
    let denom = Rat::one() + delta_star_v.clone() / rat_int(w as i64);
    Ok(rat_int(cap as i64) - gap / denom)
}

/// s_0(k, v, w) = 2k^2 - 2 - (2k^2 - 2 - (2v + w^2 - w)) / (1 + Delta*_v / w).
pub fn s0(k: u32, v: u64, w: u32, mode: EtaMode) -> Result<Rat> {
    let ds = delta_star(v, k, mode)?;
    s0_with_delta(k, v, w, &ds)
}

/// Grid points (v, delta*, m, family) searched by `s1`.
fn s1_grid(k: u32, mode: EtaMode) -> Vec<(u64, Rat, u32, Provenance)> {
    let mut grid = Vec::new();
    match mode {
        EtaMode::PaperFamilies => {
            for m in 1..=(k / 2) {
                let d = (k - m) as u64;
                let v = d * d + d;
                let ds = rat_int((m as i64) * (m as i64) - 1);
                grid.push((v, ds, m, Provenance::Family93));
            }
            for m in 1..=(k.saturating_sub(1) / 2) {
                let d = (k - m) as u64;
                let v = d * d - 1;
                let m64 = m as i64;
                let ds =
                    rat_int(m64 * m64 + m64 - 1) + rat_int(m64) / rat_int((k - m - 1) as i64);
                grid.push((v, ds, m, Provenance::Family94));
            }
        }
        EtaMode::Envelope => {
            // 2v + w^2 - w < 2k^2 - 2 forces v < k^2 - 1 even at w = 1.
            let vmax = (k as u64) * (k as u64);
            for v in 1..vmax {
                if let Ok(ds) = delta_star(v, k, mode) {
                    let (m, fam) = family_delta_star(v, k)
                        .map(|(_, m, f)| (m, f))
                        .unwrap_or((0, Provenance::Envelope));
                    grid.push((v, ds, m, fam));
                }
            }
        }
    }
    grid
}

/// s_1(k): minimize s_0(k, v, w) over the admissible grid. Ties break by
/// smallest w, then smallest v, then family-9.3 before family-9.4.
pub fn s1(k: u32, mode: EtaMode) -> Result<S1Result> {
    if k < 3 {
        return Err(Error::invalid("s1 requires k >= 3"));
    }
    let grid = s1_grid(k, mode);
    let mut best: Option<(Rat, u32, u64, Provenance, u32)> = None;
    for w in 1..k {
        for (v, ds, m, fam) in &grid {
            let lhs = 2 * *v as i128 + (w as i128) * (w as i128) - w as i128;
            if lhs >= 2 * (k as i128) * (k as i128) - 2 {
                continue;
            }
            let val = s0_with_delta(k, *v, w, ds)?;
            let candidate = (val, w, *v, *fam, *m);
            let better = match &best {
                None => true,
                Some(b) => {
                    // Tie-break on (value, w, v, family).
                    (&candidate.0, candidate.1, candidate.2, candidate.3)
                        < (&b.0, b.1, b.2, b.3)
                }
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    let (value, w, v, fam, m) =
        best.ok_or_else(|| Error::Internal(format!("empty s1 grid for k = {k}")))?;
    let gtilde_big = floor_int(&value) + BigInt::one();
    let gtilde = gtilde_big
        .to_u64()
        .ok_or_else(|| Error::Internal("gtilde overflows u64".into()))?;
    Ok(S1Result {
        k,
        value,
        argmin_m: m,
        argmin_w: w,
        argmin_family: fam,
        argmin_v: v,
        gtilde,
    })
}

/// eta_r*(s, w) = (1/r) eta(s - r(r-1)/2, w), from the hybrid Weyl-sum bound.
pub fn eta_r_star(r: u64, s: u64, w: u32, mode: EtaMode) -> Result<Rat> {
    if r < 1 {
        return Err(Error::invalid("eta_r_star requires r >= 1"));
    }
    let drop = r * (r - 1) / 2;
    if s <= drop {
        return Err(Error::invalid(format!(
            "eta_r_star requires s - r(r-1)/2 >= 1, got s = {s}, r = {r}"
        )));
    }
    let inner = eta_known(s - drop, w, mode)?;
    Ok(inner.value / rat_u(r))
}

/// The G-tilde table rows for k_min..=k_max.
pub fn gtilde_table(k_min: u32, k_max: u32, mode: EtaMode) -> Result<Vec<S1Result>> {
    if k_min < 3 || k_min > k_max {
        return Err(Error::invalid("gtilde_table requires 3 <= k_min <= k_max"));
    }
    (k_min..=k_max).map(|k| s1(k, mode)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn params(k: u32, r: u32, t: u32) -> VinogradovParams {
        VinogradovParams::new(k, r, t).unwrap()
    }

    #[test]
    fn kappa_diagonal_case() {
        // r + t = k makes the subtracted term vanish: kappa = r(t+1).
        assert_eq!(kappa(&params(4, 2, 2)).unwrap(), rat_int(6));
    }

    #[test]
    fn kappa_specialization_identities() {
        // kappa(k, k-m, k-m) = k(k+1)/2 - m^2 for all k <= 30, 2m <= k.
        for k in 2..=30u32 {
            for m in 0..=(k / 2) {
                let r = k - m;
                if let Ok(p) = VinogradovParams::new(k, r, r) {
                    let expect = rat_int((k as i64) * (k as i64 + 1) / 2 - (m as i64) * (m as i64));
                    assert_eq!(kappa(&p).unwrap(), expect, "k={k} m={m}");
                }
            }
            // kappa(k, k-m-1, k-m) = k(k+1)/2 - m^2 - m - m/(k-m-1), 2m <= k-1.
            for m in 0..=((k - 1) / 2) {
                if k - m - 1 == 0 {
                    continue;
                }
                if let Ok(p) = VinogradovParams::new(k, k - m - 1, k - m) {
                    let m64 = m as i64;
                    let expect = rat_int((k as i64) * (k as i64 + 1) / 2 - m64 * m64 - m64)
                        - rat_int(m64) / rat_int((k - m - 1) as i64);
                    assert_eq!(kappa(&p).unwrap(), expect, "k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn kappa_case_m3_k13() {
        // Direct evaluation, independently expanded: 236/3.
        assert_eq!(kappa(&params(13, 9, 10)).unwrap(), rat(236, 3));
    }

    #[test]
    fn kappa_cap() {
        // kappa <= s + r = rt + r for every admissible triple, k <= 30.
        for k in 2..=30 {
            for p in VinogradovParams::all_for_k(k) {
                let cap = rat_int((p.r as i64) * (p.t as i64) + p.r as i64);
                assert!(kappa(&p).unwrap() <= cap, "{p:?}");
            }
        }
    }

    #[test]
    fn mu_nu_examples() {
        assert_eq!(mu_nu(&params(3, 1, 2)).unwrap(), (0, 0));
        for k in 2..=12 {
            let p = params(k, k, k);
            let half = (k as u64) * (k as u64 - 1) / 2;
            assert_eq!(mu_nu(&p).unwrap(), (half, half));
        }
        assert_eq!(mu_nu(&params(5, 4, 3)).unwrap(), (1, 5));
    }

    #[test]
    fn mu_plus_nu_identity() {
        // mu + nu = (t+r-k)(r-1) for every admissible triple.
        for k in 2..=20 {
            for p in VinogradovParams::all_for_k(k) {
                let (mu, nu) = mu_nu(&p).unwrap();
                let e = (p.t + p.r - p.k) as u64;
                assert_eq!(mu + nu, e * (p.r as u64 - 1), "{p:?}");
            }
        }
    }

    #[test]
    fn diagonal_degeneracy() {
        for k in 2..=20u32 {
            for p in VinogradovParams::all_for_k(k) {
                if p.r + p.t == p.k {
                    assert_eq!(mu_nu(&p).unwrap(), (0, 0));
                    let expect = rat_int((p.r as i64) * (p.t as i64 + 1));
                    assert_eq!(kappa(&p).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(12, 0, DeltaCase::II).unwrap(), (rat_int(0), 143));
        assert_eq!(
            delta(12, 2, DeltaCase::II).unwrap(),
            (rat_int(6) + rat(2, 9), 99)
        );
        for k in 3..=20u32 {
            let (v, thr) = delta(k, 0, DeltaCase::I).unwrap();
            assert_eq!(v, rat_int(0));
            assert_eq!(thr, (k as u64) * (k as u64) + k as u64);
        }
        assert!(delta(12, 7, DeltaCase::I).is_err());
        assert!(delta(12, 6, DeltaCase::II).is_err());
    }

    #[test]
    fn eta_known_examples() {
        let b = eta_known(99, 12, EtaMode::PaperFamilies).unwrap();
        assert_eq!(b.value, rat(56, 9)); // 6 + 2/9, thm 1.2(ii) at m=2
        assert_eq!(b.provenance, Provenance::Thm12CaseII);

        for k in 3..=20u64 {
            let b = eta_known(k * k + k, k as u32, EtaMode::PaperFamilies).unwrap();
            assert_eq!(b.value, Rat::zero());
        }

        let b = eta_known(1, 4, EtaMode::PaperFamilies).unwrap();
        assert_eq!(b.value, rat_int(9));
        assert_eq!(b.provenance, Provenance::Thm11);
    }

    #[test]
    fn eta_monotone_in_s() {
        for k in [3u32, 4, 5, 8, 12, 13] {
            let mut prev: Option<Rat> = None;
            for s in 1..=(k as u64 * k as u64 + k as u64 + 5) {
                let b = eta_known(s, k, EtaMode::PaperFamilies).unwrap();
                if let Some(p) = prev {
                    assert!(b.value <= p, "k={k} s={s}");
                }
                prev = Some(b.value);
            }
        }
    }

    #[test]
    fn envelope_never_worse_than_families() {
        for k in [4u32, 6, 12] {
            for s in 1..=(k as u64 * k as u64 + k as u64) {
                let fam = eta_known(s, k, EtaMode::PaperFamilies).unwrap().value;
                let env = eta_known(s, k, EtaMode::Envelope).unwrap().value;
                assert!(env <= fam, "k={k} s={s}");
                assert!(env >= Rat::zero());
            }
        }
    }

    #[test]
    fn envelope_matches_kappa_anchor() {
        // k = 12, r = t = 6: s = 42, kappa = 78 - 36 = 42, so eta <= 36,
        // which coincides with the thm 1.1 value at its range edge.
        let env = eta_known(42, 12, EtaMode::Envelope).unwrap();
        assert_eq!(env.value, rat_int(36));
    }

    #[test]
    fn delta_star_examples() {
        assert_eq!(delta_star(99, 12, EtaMode::PaperFamilies).unwrap(), rat(47, 9));
        for k in 3..=20u32 {
            let d = (k - 1) as u64;
            assert_eq!(
                delta_star(d * d + d, k, EtaMode::PaperFamilies).unwrap(),
                Rat::zero()
            );
        }
        assert_eq!(delta_star(120, 14, EtaMode::PaperFamilies).unwrap(), rat(113, 10));
    }

    #[test]
    fn s0_examples() {
        assert_eq!(s0(12, 99, 5, EtaMode::PaperFamilies).unwrap(), rat(5813, 23));
        let v = s0(13, 99, 6, EtaMode::PaperFamilies).unwrap();
        assert!(v > rat_int(298) && v < rat_int(299));
        assert_eq!(v, rat(3882, 13));
        // Delta* = 0 collapses the fraction: s0 = 2v + w^2 - w.
        let k = 13u32;
        let v0 = 12u64 * 12 + 12; // family 9.3 with m = 1
        assert_eq!(
            s0(k, v0, 4, EtaMode::PaperFamilies).unwrap(),
            rat_int(2 * v0 as i64 + 16 - 4)
        );
    }

    #[test]
    fn s1_k12() {
        let r = s1(12, EtaMode::PaperFamilies).unwrap();
        assert_eq!(r.value, rat(5813, 23));
        assert_eq!(r.gtilde, 253);
        assert_eq!(r.argmin_m, 2);
        assert_eq!(r.argmin_w, 5);
        assert_eq!(r.argmin_v, 99);
        assert_eq!(r.argmin_family, Provenance::Family94);
    }

    #[test]
    fn s1_dominates_grid() {
        for k in [3u32, 5, 12, 16] {
            let r = s1(k, EtaMode::PaperFamilies).unwrap();
            for (v, ds, _, _) in s1_grid(k, EtaMode::PaperFamilies) {
                for w in 1..k {
                    let lhs = 2 * v as i128 + (w as i128) * (w as i128) - w as i128;
                    if lhs >= 2 * (k as i128) * (k as i128) - 2 {
                        continue;
                    }
                    let val = s0_with_delta(k, v, w, &ds).unwrap();
                    assert!(r.value <= val, "k={k} v={v} w={w}");
                }
            }
        }
    }

    #[test]
    fn s1_large_k_asymptotic() {
        // s1(k) <= 2k^2 - 2^{2/3} k^{4/3} + C k with a generous C.
        for k in [100u32, 150, 200] {
            let r = s1(k, EtaMode::PaperFamilies).unwrap();
            let kf = k as f64;
            let bound = 2.0 * kf * kf - 2f64.powf(2.0 / 3.0) * kf.powf(4.0 / 3.0) + 10.0 * kf;
            let val = r.value.numer().to_f64().unwrap() / r.value.denom().to_f64().unwrap();
            assert!(val <= bound, "k={k}: s1={val} bound={bound}");
        }
    }

    #[test]
    fn eta_r_star_cases() {
        let direct = eta_known(100, 12, EtaMode::PaperFamilies).unwrap().value;
        assert_eq!(eta_r_star(1, 100, 12, EtaMode::PaperFamilies).unwrap(), direct);
        let e = eta_r_star(2, 100, 12, EtaMode::PaperFamilies).unwrap();
        let inner = eta_known(99, 12, EtaMode::PaperFamilies).unwrap().value;
        assert_eq!(e, inner / rat_int(2));
        assert!(eta_r_star(3, 3, 12, EtaMode::PaperFamilies).is_err());
    }
}
