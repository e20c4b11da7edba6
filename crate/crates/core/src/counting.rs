//! Exact counting of equal-power-sum systems by meet-in-the-middle
//! convolution of multiplicity maps.
//!
//! Every counter here reduces to the same combinatorial identity: the number
//! of solutions of a symmetric system L(x) = L(y) equals the sum over keys K
//! of N(K)^2, where N(K) is the number of tuples x with L(x) = K. The maps N
//! are built by convolving half-tuple maps, never by enumerating the full
//! 2s-dimensional product space. A naive full-enumeration oracle lives in
//! the `naive` submodule and is used by the test suites only.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};

/// Resource caps for the counting routines. Exceeding one produces a typed
/// error instead of an OOM or a multi-hour loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Maximum number of distinct keys held across all multiplicity maps.
    pub max_keys: u128,
    /// Maximum iteration count for any direct enumeration loop.
    pub max_naive: u128,
    /// Worker threads for half-map construction (1 = sequential).
    pub threads: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_keys: 50_000_000,
            max_naive: 100_000_000,
            threads: 1,
        }
    }
}

impl Budget {
    pub fn check_naive(&self, what: &str, estimate: u128) -> Result<()> {
        if estimate > self.max_naive {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                estimate,
                limit: self.max_naive,
            });
        }
        Ok(())
    }

    fn check_keys(&self, what: &str, estimate: u128) -> Result<()> {
        if estimate > self.max_keys {
            return Err(Error::BudgetExceeded {
                what: what.to_string(),
                estimate,
                limit: self.max_keys,
            });
        }
        Ok(())
    }
}

/// The vector of power sums (sum x_i, sum x_i^2, ..., sum x_i^k) identifying
/// a tuple up to permutation. The byte encoding is canonical: two keys are
/// byte-identical exactly when the vectors are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PowerSumKey(pub Vec<BigInt>);

impl PowerSumKey {
    pub fn zero(len: usize) -> Self {
        PowerSumKey(vec![BigInt::zero(); len])
    }

    pub fn add(&self, other: &PowerSumKey) -> PowerSumKey {
        debug_assert_eq!(self.0.len(), other.0.len());
        PowerSumKey(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Length-prefixed sign/magnitude big-endian encoding. Canonical because
    /// BigInt magnitudes have no leading zero limbs and the length prefix
    /// removes framing ambiguity.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + self.0.len() * 12);
        out.extend_from_slice(&(self.0.len() as u32).to_be_bytes());
        for c in &self.0 {
            let (sign, mag) = c.to_bytes_be();
            out.push(match sign {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            });
            out.extend_from_slice(&(mag.len() as u32).to_be_bytes());
            out.extend_from_slice(&mag);
        }
        out
    }
}

/// Multiplicity map from power-sum keys to tuple counts.
pub type KeyMap = HashMap<PowerSumKey, BigUint>;

/// Convolve two multiplicity maps: the result counts concatenated tuples.
fn convolve(a: &KeyMap, b: &KeyMap, budget: &Budget, what: &str) -> Result<KeyMap> {
    let mut out: KeyMap = HashMap::new();
    for (ka, ma) in a {
        for (kb, mb) in b {
            let key = ka.add(kb);
            *out.entry(key).or_insert_with(BigUint::zero) += ma * mb;
            if out.len() as u128 > budget.max_keys {
                return Err(Error::BudgetExceeded {
                    what: what.to_string(),
                    estimate: (a.len() as u128) * (b.len() as u128),
                    limit: budget.max_keys,
                });
            }
        }
    }
    Ok(out)
}

/// Multiplicity map of ordered `arity`-tuples drawn (with repetition) from
/// `elements`, where each element contributes the given key vector. Built by
/// binary exponentiation of the single-element map under convolution, with a
/// parallel first level when `budget.threads > 1`.
pub fn tuple_key_map(
    elements: &[PowerSumKey],
    arity: usize,
    budget: &Budget,
    what: &str,
) -> Result<KeyMap> {
    if arity == 0 {
        let len = elements.first().map(|k| k.0.len()).unwrap_or(0);
        let mut m = HashMap::new();
        m.insert(PowerSumKey::zero(len), BigUint::one());
        return Ok(m);
    }
    budget.check_keys(what, elements.len() as u128)?;
    let single = single_map(elements, budget);
    let mut acc: Option<KeyMap> = None;
    let mut base = single;
    let mut e = arity;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => convolve(&a, &base, budget, what)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = convolve(&base, &base, budget, what)?;
    }
    Ok(acc.expect("arity >= 1"))
}

fn single_map(elements: &[PowerSumKey], budget: &Budget) -> KeyMap {
    let threads = budget.threads.max(1);
    if threads == 1 || elements.len() < 1024 {
        let mut m: KeyMap = HashMap::new();
        for k in elements {
            *m.entry(k.clone()).or_insert_with(BigUint::zero) += BigUint::one();
        }
        return m;
    }
    let chunk = elements.len().div_ceil(threads);
    let partials: Vec<KeyMap> = std::thread::scope(|scope| {
        let handles: Vec<_> = elements
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    let mut m: KeyMap = HashMap::new();
                    for k in part {
                        *m.entry(k.clone()).or_insert_with(BigUint::zero) += BigUint::one();
                    }
                    m
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    // Addition is associative and commutative, so the merged map (and every
    // count derived from it) is identical for any partition.
    let mut out: KeyMap = HashMap::new();
    for p in partials {
        for (k, m) in p {
            *out.entry(k).or_insert_with(BigUint::zero) += m;
        }
    }
    out
}

/// Sum of squared multiplicities: the number of (x, y) pairs with equal keys.
pub fn sum_of_squares(map: &KeyMap) -> BigUint {
    map.values().map(|m| m * m).sum()
}

/// A finished count together with its parameters and timing.
#[derive(Debug, Clone)]
pub struct CountRecord {
    pub op: String,
    pub params: serde_json::Value,
    pub count: BigUint,
    pub elapsed_ms: u128,
}

impl CountRecord {
    fn finish(op: &str, params: serde_json::Value, count: BigUint, start: Instant) -> Self {
        CountRecord {
            op: op.to_string(),
            params,
            count,
            elapsed_ms: start.elapsed().as_millis(),
        }
    }

    /// Counts are serialized as decimal strings so arbitrary precision
    /// survives JSON round trips.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "op": self.op,
            "params": self.params,
            "count": self.count.to_string(),
            "elapsed_ms": self.elapsed_ms,
        })
    }
}

fn power_key(x: u64, degrees: &[u32]) -> PowerSumKey {
    let xb = BigInt::from(x);
    PowerSumKey(degrees.iter().map(|&j| xb.pow(j)).collect())
}

/// J_{s,k}(X): solutions of sum x_i^j = sum y_i^j for 1 <= j <= k with
/// 1 <= x, y <= X in s variables per side.
#[allow(non_snake_case)]
pub fn count_J(s: u32, k: u32, x: u64, budget: &Budget) -> Result<CountRecord> {
    let start = Instant::now();
    if s < 1 || k < 1 || x < 1 {
        return Err(Error::invalid("count_J requires s, k, X >= 1"));
    }
    let degrees: Vec<u32> = (1..=k).collect();
    let elements: Vec<PowerSumKey> = (1..=x).map(|v| power_key(v, &degrees)).collect();
    let map = tuple_key_map(&elements, s as usize, budget, "count_J half-tuple keys")?;
    let count = sum_of_squares(&map);
    Ok(CountRecord::finish(
        "count-j",
        json!({"s": s, "k": k, "X": x}),
        count,
        start,
    ))
}

/// Diagonal count: ordered pairs (x, y) in [1,X]^{2s} with y a permutation
/// of x. Computed from the multiset census, not by enumeration of pairs.
pub fn count_diagonal(s: u32, x: u64, budget: &Budget) -> Result<CountRecord> {
    let start = Instant::now();
    if s < 1 || x < 1 {
        return Err(Error::invalid("count_diagonal requires s, X >= 1"));
    }
    // Enumerate multisets as nondecreasing tuples; each contributes the
    // square of its permutation count (s! / prod of multiplicity factorials).
    let s_us = s as usize;
    let mut total = BigUint::zero();
    let s_fact: BigUint = (1..=s as u64).map(BigUint::from).product();
    let mut stack: Vec<u64> = Vec::with_capacity(s_us);
    let mut visited: u128 = 0;
    fn rec(
        stack: &mut Vec<u64>,
        lo: u64,
        x: u64,
        s_us: usize,
        s_fact: &BigUint,
        total: &mut BigUint,
        visited: &mut u128,
        budget: &Budget,
    ) -> Result<()> {
        if stack.len() == s_us {
            *visited += 1;
            budget.check_naive("count_diagonal multiset census", *visited)?;
            let mut perms = s_fact.clone();
            let mut run = 1u64;
            for i in 1..stack.len() {
                if stack[i] == stack[i - 1] {
                    run += 1;
                    perms /= BigUint::from(run);
                } else {
                    run = 1;
                }
            }
            *total += &perms * &perms;
            return Ok(());
        }
        for v in lo..=x {
            stack.push(v);
            rec(stack, v, x, s_us, s_fact, total, visited, budget)?;
            stack.pop();
        }
        Ok(())
    }
    rec(&mut stack, 1, x, s_us, &s_fact, &mut total, &mut visited, budget)?;
    Ok(CountRecord::finish(
        "count-diagonal",
        json!({"s": s, "X": x}),
        total,
        start,
    ))
}

/// I_s(X): solutions of sum x_i^k = sum y_i^k, a single equation.
pub fn count_weyl_moment(s: u32, k: u32, x: u64, budget: &Budget) -> Result<CountRecord> {
    let start = Instant::now();
    if s < 1 || k < 1 || x < 1 {
        return Err(Error::invalid("count_weyl_moment requires s, k, X >= 1"));
    }
    let elements: Vec<PowerSumKey> = (1..=x).map(|v| power_key(v, &[k])).collect();
    let map = tuple_key_map(&elements, s as usize, budget, "weyl moment half keys")?;
    let count = sum_of_squares(&map);
    Ok(CountRecord::finish(
        "weyl-moment",
        json!({"s": s, "k": k, "X": x}),
        count,
        start,
    ))
}

/// I_{s,m}(X; q, b): solutions of sum ((q x_i + b)^k - (q y_i + b)^k) = 0
/// together with sum (x_i^j - y_i^j) = 0 for 1 <= j <= m-1, over
/// 0 <= x, y <= floor(X/q).
pub fn count_shifted(
    s: u32,
    m: u32,
    k: u32,
    x: u64,
    q: u64,
    b: u64,
    budget: &Budget,
) -> Result<CountRecord> {
    let start = Instant::now();
    if s < 1 || m < 1 || m > k {
        return Err(Error::invalid("count_shifted requires s >= 1 and 1 <= m <= k"));
    }
    if q < 1 || b >= q {
        return Err(Error::invalid("count_shifted requires q >= 1 and 0 <= b < q"));
    }
    let top = x / q;
    let elements: Vec<PowerSumKey> = (0..=top)
        .map(|v| {
            let shifted = BigInt::from(q * v + b).pow(k);
            let mut key = vec![shifted];
            let vb = BigInt::from(v);
            for j in 1..m {
                key.push(vb.pow(j));
            }
            PowerSumKey(key)
        })
        .collect();
    let map = tuple_key_map(&elements, s as usize, budget, "shifted system half keys")?;
    let count = sum_of_squares(&map);
    Ok(CountRecord::finish(
        "count-shifted",
        json!({"s": s, "m": m, "k": k, "X": x, "q": q, "b": b}),
        count,
        start,
    ))
}

/// Parameters of the mixed mean values I_{a,b} and K_{a,b}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixedMeanParams {
    pub k: u32,
    pub r: u32,
    pub t: u32,
    pub p: u64,
    pub a: u32,
    pub b: u32,
    pub xi: u64,
    pub eta: u64,
    pub x: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MixedKind {
    I,
    K,
}

impl MixedMeanParams {
    pub fn s(&self) -> u64 {
        self.r as u64 * self.t as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 || self.r < 1 || self.t < 1 || self.x < 1 {
            return Err(Error::invalid("mixed mean requires k, r, t, X >= 1"));
        }
        if self.p <= self.k as u64 {
            return Err(Error::invalid(format!(
                "mixed mean requires prime p > k, got p = {}, k = {}",
                self.p, self.k
            )));
        }
        if !crate::congruence::is_prime(self.p) {
            return Err(Error::invalid(format!("p = {} is not prime", self.p)));
        }
        if self.a < 1 {
            return Err(Error::invalid("mixed mean requires a >= 1"));
        }
        if self.a >= self.b {
            return Err(Error::invalid("mixed mean requires a < b"));
        }
        if self.a >= 1 && self.eta % self.p == self.xi % self.p {
            return Err(Error::invalid(
                "mixed mean requires eta != xi mod p when a >= 1",
            ));
        }
        let pa = checked_pow(self.p, self.a)?;
        if self.xi < 1 || self.xi > pa {
            return Err(Error::invalid(format!("xi must lie in [1, p^a] = [1, {pa}]")));
        }
        let pb = checked_pow(self.p, self.b)?;
        if self.eta < 1 || self.eta > pb {
            return Err(Error::invalid(format!("eta must lie in [1, p^b] = [1, {pb}]")));
        }
        Ok(())
    }
}

fn checked_pow(p: u64, e: u32) -> Result<u64> {
    p.checked_pow(e)
        .ok_or_else(|| Error::invalid(format!("p^{e} overflows for p = {p}")))
}

/// Multiplicity map of well-conditioned r-tuples: coordinates in [1, X],
/// congruent to `xi` mod p^c, pairwise distinct mod p^{c+1}.
fn conditioned_block_map(
    x: u64,
    degrees: &[u32],
    p: u64,
    c: u32,
    xi: u64,
    r: u32,
    budget: &Budget,
    what: &str,
) -> Result<KeyMap> {
    let pc = checked_pow(p, c)?;
    let pc1 = checked_pow(p, c + 1)?;
    // Group admissible values by residue class mod p^{c+1}; there are at
    // most p such classes above xi mod p^c.
    let mut classes: HashMap<u64, Vec<PowerSumKey>> = HashMap::new();
    for v in 1..=x {
        if v % pc == xi % pc {
            classes
                .entry(v % pc1)
                .or_default()
                .push(power_key(v, degrees));
        }
    }
    let class_maps: Vec<KeyMap> = classes
        .into_values()
        .map(|els| tuple_key_map(&els, 1, budget, what))
        .collect::<Result<_>>()?;
    // Ordered tuples over distinct classes: sum over injections of the
    // convolution of the chosen class maps. Ordered injections from an
    // unordered choice differ only by the r! factor, applied at the end of
    // each recursion branch via permutation counting on equal maps being
    // unnecessary: we enumerate ordered sequences of distinct indices.
    let len = degrees.len();
    let mut acc: KeyMap = HashMap::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        class_maps: &[KeyMap],
        chosen: &mut Vec<usize>,
        r: usize,
        len: usize,
        current: &KeyMap,
        acc: &mut KeyMap,
        budget: &Budget,
        what: &str,
    ) -> Result<()> {
        if chosen.len() == r {
            for (k, m) in current {
                *acc.entry(k.clone()).or_insert_with(BigUint::zero) += m;
            }
            return Ok(());
        }
        for i in 0..class_maps.len() {
            if chosen.contains(&i) {
                continue;
            }
            chosen.push(i);
            let next = convolve(current, &class_maps[i], budget, what)?;
            rec(class_maps, chosen, r, len, &next, acc, budget, what)?;
            chosen.pop();
        }
        Ok(())
    }
    let mut unit: KeyMap = HashMap::new();
    unit.insert(PowerSumKey::zero(len), BigUint::one());
    rec(
        &class_maps,
        &mut chosen,
        r as usize,
        len,
        &unit,
        &mut acc,
        budget,
        what,
    )?;
    Ok(acc)
}

/// The mixed mean values: I_{a,b}(X; xi, eta) pairs a well-conditioned
/// r-tuple with an s-tuple congruent to eta mod p^b; K_{a,b}(X; xi, eta)
/// pairs it with t well-conditioned r-blocks at level b. Both count the
/// solutions of the corresponding equal-power-sum system.
pub fn count_mixed(params: &MixedMeanParams, which: MixedKind, budget: &Budget) -> Result<CountRecord> {
    let start = Instant::now();
    params.validate()?;
    let degrees: Vec<u32> = (1..=params.k).collect();
    let xmap = conditioned_block_map(
        params.x,
        &degrees,
        params.p,
        params.a,
        params.xi,
        params.r,
        budget,
        "mixed mean x-block keys",
    )?;
    // One side of the equation is (x-block, eta-side block); the count is
    // the sum of squared multiplicities of the combined key.
    let eta_side = match which {
        MixedKind::I => {
            let pb = checked_pow(params.p, params.b)?;
            let elements: Vec<PowerSumKey> = (1..=params.x)
                .filter(|v| v % pb == params.eta % pb)
                .map(|v| power_key(v, &degrees))
                .collect();
            tuple_key_map(&elements, params.s() as usize, budget, "mixed mean eta keys")?
        }
        MixedKind::K => {
            let block = conditioned_block_map(
                params.x,
                &degrees,
                params.p,
                params.b,
                params.eta,
                params.r,
                budget,
                "mixed mean eta-block keys",
            )?;
            let mut acc = block.clone();
            for _ in 1..params.t {
                acc = convolve(&acc, &block, budget, "mixed mean eta-block power")?;
            }
            acc
        }
    };
    let combined = convolve(&xmap, &eta_side, budget, "mixed mean combined keys")?;
    let count = sum_of_squares(&combined);
    Ok(CountRecord::finish(
        match which {
            MixedKind::I => "count-mixed-i",
            MixedKind::K => "count-mixed-k",
        },
        json!({
            "k": params.k, "r": params.r, "t": params.t, "p": params.p,
            "a": params.a, "b": params.b, "xi": params.xi, "eta": params.eta,
            "X": params.x,
        }),
        count,
        start,
    ))
}

/// Full-enumeration oracles. Exponentially slower than the map-based
/// counters; retained for cross-checking only.
pub mod naive {
    use super::*;

    fn powersums(tuple: &[u64], degrees: &[u32]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); degrees.len()];
        for &v in tuple {
            let vb = BigInt::from(v);
            for (i, &j) in degrees.iter().enumerate() {
                out[i] += vb.pow(j);
            }
        }
        out
    }

    fn for_each_tuple(
        domain: &[u64],
        arity: usize,
        budget: &Budget,
        what: &str,
        f: &mut dyn FnMut(&[u64]),
    ) -> Result<()> {
        let est = (domain.len() as u128)
            .checked_pow(arity as u32)
            .unwrap_or(u128::MAX);
        budget.check_naive(what, est)?;
        let mut tuple = vec![0u64; arity];
        fn rec(domain: &[u64], tuple: &mut [u64], i: usize, f: &mut dyn FnMut(&[u64])) {
            if i == tuple.len() {
                f(tuple);
                return;
            }
            for &v in domain {
                tuple[i] = v;
                rec(domain, tuple, i + 1, f);
            }
        }
        rec(domain, &mut tuple, 0, f);
        Ok(())
    }

    /// Count by building the key census of full s-tuples one tuple at a time.
    fn census_count(
        domain: &[u64],
        arity: usize,
        degrees: &[u32],
        budget: &Budget,
        what: &str,
    ) -> Result<BigUint> {
        let mut census: HashMap<Vec<BigInt>, BigUint> = HashMap::new();
        for_each_tuple(domain, arity, budget, what, &mut |t| {
            *census
                .entry(powersums(t, degrees))
                .or_insert_with(BigUint::zero) += BigUint::one();
        })?;
        Ok(census.values().map(|m| m * m).sum())
    }

    #[allow(non_snake_case)]
    pub fn count_J(s: u32, k: u32, x: u64, budget: &Budget) -> Result<BigUint> {
        let domain: Vec<u64> = (1..=x).collect();
        let degrees: Vec<u32> = (1..=k).collect();
        census_count(&domain, s as usize, &degrees, budget, "naive count_J")
    }

    pub fn count_weyl_moment(s: u32, k: u32, x: u64, budget: &Budget) -> Result<BigUint> {
        let domain: Vec<u64> = (1..=x).collect();
        census_count(&domain, s as usize, &[k], budget, "naive weyl moment")
    }

    pub fn count_shifted(
        s: u32,
        m: u32,
        k: u32,
        x: u64,
        q: u64,
        b: u64,
        budget: &Budget,
    ) -> Result<BigUint> {
        let top = x / q;
        let domain: Vec<u64> = (0..=top).collect();
        let mut census: HashMap<Vec<BigInt>, BigUint> = HashMap::new();
        for_each_tuple(&domain, s as usize, budget, "naive shifted", &mut |t| {
            let mut key = vec![BigInt::zero(); m as usize];
            for &v in t {
                key[0] += BigInt::from(q * v + b).pow(k);
                for j in 1..m {
                    key[j as usize] += BigInt::from(v).pow(j);
                }
            }
            *census.entry(key).or_insert_with(BigUint::zero) += BigUint::one();
        })?;
        Ok(census.values().map(|mm| mm * mm).sum())
    }

    /// Direct census for the mixed means: enumerate the conditioned
    /// one-side tuples explicitly and square the multiplicities.
    pub fn count_mixed(
        params: &MixedMeanParams,
        which: MixedKind,
        budget: &Budget,
    ) -> Result<BigUint> {
        params.validate()?;
        let degrees: Vec<u32> = (1..=params.k).collect();
        let pa = params.p.pow(params.a);
        let pa1 = params.p.pow(params.a + 1);
        let pb = params.p.pow(params.b);
        let pb1 = params.p.pow(params.b + 1);
        let xdom: Vec<u64> = (1..=params.x)
            .filter(|v| v % pa == params.xi % pa)
            .collect();
        let mut census: HashMap<Vec<BigInt>, BigUint> = HashMap::new();
        let r = params.r as usize;
        match which {
            MixedKind::I => {
                let edom: Vec<u64> = (1..=params.x)
                    .filter(|v| v % pb == params.eta % pb)
                    .collect();
                let s = params.s() as usize;
                for_each_tuple(&xdom, r, budget, "naive mixed x-block", &mut |xs| {
                    if !distinct_mod(xs, pa1) {
                        return;
                    }
                    let base = powersums(xs, &degrees);
                    // Inner enumeration of the eta-side tuple.
                    let mut inner = vec![0u64; s];
                    enumerate_inner(&edom, &mut inner, 0, &mut |es| {
                        let mut key = base.clone();
                        for (i, v) in powersums(es, &degrees).into_iter().enumerate() {
                            key[i] += v;
                        }
                        *census.entry(key).or_insert_with(BigUint::zero) += BigUint::one();
                    });
                })?;
            }
            MixedKind::K => {
                let edom: Vec<u64> = (1..=params.x)
                    .filter(|v| v % pb == params.eta % pb)
                    .collect();
                let t = params.t as usize;
                for_each_tuple(&xdom, r, budget, "naive mixed x-block", &mut |xs| {
                    if !distinct_mod(xs, pa1) {
                        return;
                    }
                    let base = powersums(xs, &degrees);
                    let mut inner = vec![0u64; r * t];
                    enumerate_inner(&edom, &mut inner, 0, &mut |es| {
                        if !es.chunks(r).all(|blk| distinct_mod(blk, pb1)) {
                            return;
                        }
                        let mut key = base.clone();
                        for (i, v) in powersums(es, &degrees).into_iter().enumerate() {
                            key[i] += v;
                        }
                        *census.entry(key).or_insert_with(BigUint::zero) += BigUint::one();
                    });
                })?;
            }
        }
        Ok(census.values().map(|m| m * m).sum())
    }

    fn enumerate_inner(domain: &[u64], tuple: &mut [u64], i: usize, f: &mut dyn FnMut(&[u64])) {
        if i == tuple.len() {
            f(tuple);
            return;
        }
        for &v in domain {
            tuple[i] = v;
            enumerate_inner(domain, tuple, i + 1, f);
        }
    }

    fn distinct_mod(tuple: &[u64], modulus: u64) -> bool {
        for i in 0..tuple.len() {
            for j in 0..i {
                if tuple[i] % modulus == tuple[j] % modulus {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn count_j_examples() {
        assert_eq!(count_J(1, 4, 9, &b()).unwrap().count, BigUint::from(9u32));
        assert_eq!(count_J(2, 2, 5, &b()).unwrap().count, BigUint::from(45u32));
        assert_eq!(count_J(3, 1, 3, &b()).unwrap().count, BigUint::from(141u32));
    }

    #[test]
    fn count_diagonal_examples() {
        assert_eq!(count_diagonal(1, 7, &b()).unwrap().count, BigUint::from(7u32));
        assert_eq!(count_diagonal(2, 5, &b()).unwrap().count, BigUint::from(45u32));
        assert_eq!(count_diagonal(3, 2, &b()).unwrap().count, BigUint::from(20u32));
    }

    #[test]
    fn diagonal_matches_count_j_in_strong_regime() {
        for s in 1..=3u32 {
            for x in 1..=6u64 {
                let d = count_diagonal(s, x, &b()).unwrap().count;
                let j = count_J(s, s, x, &b()).unwrap().count;
                assert_eq!(d, j, "s={s} X={x}");
            }
        }
    }

    #[test]
    fn weyl_moment_examples() {
        assert_eq!(
            count_weyl_moment(1, 3, 12, &b()).unwrap().count,
            BigUint::from(12u32)
        );
        // Includes the taxicab coincidence 1^3 + 12^3 = 9^3 + 10^3.
        let diag12 = count_diagonal(2, 12, &b()).unwrap().count;
        assert_eq!(
            count_weyl_moment(2, 3, 12, &b()).unwrap().count,
            diag12 + BigUint::from(8u32)
        );
        let diag10 = count_diagonal(2, 10, &b()).unwrap().count;
        assert_eq!(count_weyl_moment(2, 5, 10, &b()).unwrap().count, diag10);
    }

    #[test]
    fn weyl_equals_count_j_at_degree_one() {
        for s in 1..=3u32 {
            for x in [4u64, 7] {
                assert_eq!(
                    count_weyl_moment(s, 1, x, &b()).unwrap().count,
                    count_J(s, 1, x, &b()).unwrap().count
                );
            }
        }
    }

    #[test]
    fn shifted_reductions() {
        // q=1, b=0, m=1: the single k-th power equation over 0..=X.
        let shifted = count_shifted(2, 1, 3, 12, 1, 0, &b()).unwrap().count;
        let naive = naive::count_shifted(2, 1, 3, 12, 1, 0, &b()).unwrap();
        assert_eq!(shifted, naive);
        // s=1: x = y forced, floor(X/q)+1 values.
        assert_eq!(
            count_shifted(1, 2, 3, 36, 3, 1, &b()).unwrap().count,
            BigUint::from(13u32)
        );
    }

    #[test]
    fn shifted_example_36() {
        let got = count_shifted(2, 2, 3, 36, 3, 1, &b()).unwrap().count;
        let oracle = naive::count_shifted(2, 2, 3, 36, 3, 1, &b()).unwrap();
        assert_eq!(got, oracle);
        assert_eq!(got, BigUint::from(325u32));
    }

    #[test]
    fn count_j_degree_monotone() {
        for s in 1..=3u32 {
            for x in 2..=6u64 {
                let mut prev: Option<BigUint> = None;
                for k in 1..=4u32 {
                    let c = count_J(s, k, x, &b()).unwrap().count;
                    if let Some(p) = &prev {
                        assert!(&c <= p, "s={s} k={k} X={x}");
                    }
                    prev = Some(c);
                }
            }
        }
    }

    #[test]
    fn count_j_bounded_below_by_diagonal() {
        for s in 1..=3u32 {
            for k in 1..=3u32 {
                for x in 1..=6u64 {
                    assert!(
                        count_J(s, k, x, &b()).unwrap().count
                            >= count_diagonal(s, x, &b()).unwrap().count
                    );
                }
            }
        }
    }

    #[test]
    fn mitm_agrees_with_naive() {
        for (s, k, x) in [(2, 2, 6), (3, 2, 5), (2, 3, 8), (3, 3, 4)] {
            assert_eq!(
                count_J(s, k, x, &b()).unwrap().count,
                naive::count_J(s, k, x, &b()).unwrap()
            );
            assert_eq!(
                count_weyl_moment(s, k, x, &b()).unwrap().count,
                naive::count_weyl_moment(s, k, x, &b()).unwrap()
            );
        }
    }

    #[test]
    fn threaded_count_matches_sequential() {
        let mut tb = b();
        tb.threads = 4;
        assert_eq!(
            count_J(3, 2, 30, &tb).unwrap().count,
            count_J(3, 2, 30, &b()).unwrap().count
        );
    }

    #[test]
    fn budget_guard_fires() {
        let tight = Budget {
            max_keys: 10,
            max_naive: 10,
            threads: 1,
        };
        match count_weyl_moment(4, 2, 100, &tight) {
            Err(Error::BudgetExceeded { .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn mixed_i_matches_naive() {
        let params = MixedMeanParams {
            k: 3,
            r: 1,
            t: 1,
            p: 5,
            a: 1,
            b: 2,
            xi: 1,
            eta: 2,
            x: 50,
        };
        let got = count_mixed(&params, MixedKind::I, &b()).unwrap().count;
        let oracle = naive::count_mixed(&params, MixedKind::I, &b()).unwrap();
        assert_eq!(got, oracle);
        // r = 1, t = 1 makes the I and K systems coincide.
        let got_k = count_mixed(&params, MixedKind::K, &b()).unwrap().count;
        assert_eq!(got, got_k);
    }

    #[test]
    fn mixed_empty_class() {
        // No x in [1, 4] is congruent to 5 mod 25.
        let params = MixedMeanParams {
            k: 3,
            r: 1,
            t: 1,
            p: 5,
            a: 2,
            b: 3,
            xi: 5,
            eta: 2,
            x: 4,
        };
        assert_eq!(
            count_mixed(&params, MixedKind::I, &b()).unwrap().count,
            BigUint::zero()
        );
    }

    #[test]
    fn mixed_requires_distinct_residues() {
        let params = MixedMeanParams {
            k: 3,
            r: 1,
            t: 1,
            p: 5,
            a: 1,
            b: 2,
            xi: 2,
            eta: 7, // 7 = 2 mod 5
            x: 30,
        };
        assert!(matches!(
            count_mixed(&params, MixedKind::I, &b()),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn mixed_r2_matches_naive() {
        let params = MixedMeanParams {
            k: 2,
            r: 2,
            t: 1,
            p: 3,
            a: 1,
            b: 2,
            xi: 1,
            eta: 2,
            x: 27,
        };
        for which in [MixedKind::I, MixedKind::K] {
            let got = count_mixed(&params, which, &b()).unwrap().count;
            let oracle = naive::count_mixed(&params, which, &b()).unwrap();
            assert_eq!(got, oracle, "{which:?}");
        }
    }

    #[test]
    fn key_encoding_is_canonical() {
        use num_bigint::BigInt;
        let a = PowerSumKey(vec![BigInt::from(300), BigInt::from(-4)]);
        let b1 = PowerSumKey(vec![BigInt::from(300), BigInt::from(-4)]);
        let c = PowerSumKey(vec![BigInt::from(300), BigInt::from(4)]);
        assert_eq!(a.canonical_bytes(), b1.canonical_bytes());
        assert_ne!(a.canonical_bytes(), c.canonical_bytes());
        let d = PowerSumKey(vec![BigInt::from(1), BigInt::from(0)]);
        let e = PowerSumKey(vec![BigInt::from(1)]);
        assert_ne!(d.canonical_bytes(), e.canonical_bytes());
    }

    #[test]
    fn record_json_uses_decimal_strings() {
        let rec = count_J(2, 2, 5, &b()).unwrap();
        let v = rec.to_json();
        assert_eq!(v["count"], serde_json::json!("45"));
        assert_eq!(v["op"], serde_json::json!("count-j"));
    }
}
