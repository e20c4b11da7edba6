//! Auxiliary congruence systems: solution enumeration by level lifting,
//! equivalence-class censuses with the factorial bound, nonsingular root
//! counting via Newton lifting, and the binomial polynomial identity.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::counting::Budget;
use crate::error::{Error, Result};
use crate::exponents::mu_nu;
use crate::params::VinogradovParams;

/// Deterministic trial-division primality, adequate for desk-scale moduli.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn pow_u128(p: u64, e: u32) -> Result<u128> {
    (p as u128)
        .checked_pow(e)
        .ok_or_else(|| Error::invalid(format!("{p}^{e} overflows the working width")))
}

fn pow_mod(mut base: u128, mut e: u32, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc
}

/// One instance of the congruence system: r unknowns z in [1, p^{kb}] with
/// sum (z_i - eta)^j = m_j mod p^{jb} for 1 <= j <= k, plus the residue side
/// conditions tied to (xi, a).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceInstance {
    pub k: u32,
    pub r: u32,
    pub t: u32,
    pub p: u64,
    pub a: u32,
    pub b: u32,
    pub xi: u64,
    pub eta: u64,
    pub m: Vec<u64>,
}

impl CongruenceInstance {
    pub fn validate(&self) -> Result<()> {
        VinogradovParams::new(self.k, self.r, self.t)?;
        if !is_prime(self.p) || self.p <= self.k as u64 {
            return Err(Error::invalid(format!(
                "p = {} must be a prime exceeding k = {}",
                self.p, self.k
            )));
        }
        if self.a >= self.b {
            return Err(Error::invalid("requires 0 <= a < b"));
        }
        let pa = pow_u128(self.p, self.a)?;
        if (self.xi as u128) < 1 || self.xi as u128 > pa {
            return Err(Error::invalid(format!("xi must lie in [1, p^a] = [1, {pa}]")));
        }
        let pb = pow_u128(self.p, self.b)?;
        if (self.eta as u128) < 1 || self.eta as u128 > pb {
            return Err(Error::invalid(format!("eta must lie in [1, p^b] = [1, {pb}]")));
        }
        if self.a >= 1 && self.eta % self.p == self.xi % self.p {
            return Err(Error::invalid("requires eta != xi mod p when a >= 1"));
        }
        if self.m.len() != self.k as usize {
            return Err(Error::invalid(format!(
                "m must have exactly k = {} components",
                self.k
            )));
        }
        for (j, &mj) in self.m.iter().enumerate() {
            let modulus = pow_u128(self.p, (j as u32 + 1) * self.b)?;
            if (mj as u128) < 1 || mj as u128 > modulus {
                return Err(Error::invalid(format!(
                    "m_{} must lie in [1, p^{{jb}}] = [1, {modulus}]",
                    j + 1
                )));
            }
        }
        pow_u128(self.p, self.k * self.b)?;
        Ok(())
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain struct")
    }
}

/// All solutions of the instance, built by lifting level by level: after
/// stage j every coordinate is pinned mod p^{jb}, and the stage-j power-sum
/// congruence prunes before the next lift. The side conditions live entirely
/// at stage 1 because a + 1 <= b. Output coordinates lie in [1, p^{kb}].
#[allow(non_snake_case)]
pub fn enumerate_B(instance: &CongruenceInstance, budget: &Budget) -> Result<Vec<Vec<u64>>> {
    instance.validate()?;
    let (p, k, r, a, b) = (
        instance.p,
        instance.k,
        instance.r as usize,
        instance.a,
        instance.b,
    );
    let pb = pow_u128(p, b)?;
    let pkb = pow_u128(p, k * b)?;
    let pa = pow_u128(p, a)?;
    let pa1 = pow_u128(p, a + 1)?;

    let mut visited: u128 = 0;

    // Stage 1: coordinates mod p^b with side conditions.
    let admissible: Vec<u128> = (0..pb)
        .filter(|&z| {
            if a >= 1 {
                z % pa == instance.xi as u128 % pa
            } else {
                z % (p as u128) != (instance.eta as u128) % (p as u128)
            }
        })
        .collect();

    let mut tuples: Vec<Vec<u128>> = Vec::new();
    {
        let m1 = instance.m[0] as u128 % pb;
        let mut cur = vec![0u128; r];
        fn rec(
            admissible: &[u128],
            cur: &mut Vec<u128>,
            i: usize,
            r: usize,
            eta: u128,
            m1: u128,
            pb: u128,
            pa1: u128,
            a: u32,
            p: u128,
            out: &mut Vec<Vec<u128>>,
            visited: &mut u128,
            budget: &Budget,
        ) -> Result<()> {
            if i == r {
                *visited += 1;
                budget.check_naive("congruence stage-1 enumeration", *visited)?;
                let sum: u128 = cur
                    .iter()
                    .map(|&z| (z + pb - eta % pb) % pb)
                    .sum::<u128>()
                    % pb;
                if sum == m1 {
                    out.push(cur.clone());
                }
                return Ok(());
            }
            'next: for &z in admissible {
                // Distinctness mod p^{a+1} (a >= 1) or mod p (a = 0).
                let dmod = if a >= 1 { pa1 } else { p };
                for &prev in cur[..i].iter() {
                    if prev % dmod == z % dmod {
                        continue 'next;
                    }
                }
                cur[i] = z;
                rec(
                    admissible, cur, i + 1, r, eta, m1, pb, pa1, a, p, out, visited, budget,
                )?;
            }
            Ok(())
        }
        rec(
            &admissible,
            &mut cur,
            0,
            r,
            instance.eta as u128,
            m1,
            pb,
            pa1,
            a,
            p as u128,
            &mut tuples,
            &mut visited,
            budget,
        )?;
    }

    // Stages 2..k: lift each coordinate from mod p^{(j-1)b} to mod p^{jb}
    // and keep tuples matching the stage congruence.
    for j in 2..=k {
        let lo = pow_u128(p, (j - 1) * b)?;
        let hi = pow_u128(p, j * b)?;
        let mj = instance.m[(j - 1) as usize] as u128 % hi;
        let eta = instance.eta as u128;
        // (z - eta)^j mod p^{jb} as a function of z mod p^{jb}.
        let mut next: Vec<Vec<u128>> = Vec::new();
        let lifts: Vec<u128> = (0..pb).collect();
        for tup in &tuples {
            let mut cur = vec![0u128; r];
            fn rec(
                tup: &[u128],
                lifts: &[u128],
                cur: &mut Vec<u128>,
                i: usize,
                r: usize,
                lo: u128,
                hi: u128,
                eta: u128,
                j: u32,
                mj: u128,
                out: &mut Vec<Vec<u128>>,
                visited: &mut u128,
                budget: &Budget,
            ) -> Result<()> {
                if i == r {
                    *visited += 1;
                    budget.check_naive("congruence lift enumeration", *visited)?;
                    let mut sum = 0u128;
                    for &z in cur.iter() {
                        let d = (z + hi - eta % hi) % hi;
                        sum = (sum + pow_mod(d, j, hi)) % hi;
                    }
                    if sum == mj {
                        out.push(cur.clone());
                    }
                    return Ok(());
                }
                for &c in lifts {
                    cur[i] = tup[i] + c * lo;
                    rec(
                        tup, lifts, cur, i + 1, r, lo, hi, eta, j, mj, out, visited, budget,
                    )?;
                }
                Ok(())
            }
            rec(
                tup,
                &lifts,
                &mut cur,
                0,
                r,
                lo,
                hi,
                eta,
                j,
                mj,
                &mut next,
                &mut visited,
                budget,
            )?;
        }
        tuples = next;
    }

    let mut out: Vec<Vec<u64>> = tuples
        .into_iter()
        .map(|tup| {
            tup.into_iter()
                .map(|z| if z == 0 { pkb as u64 } else { z as u64 })
                .collect()
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Naive full-scan oracle over [1, p^{kb}]^r; test use only.
#[allow(non_snake_case)]
pub fn enumerate_B_naive(instance: &CongruenceInstance, budget: &Budget) -> Result<Vec<Vec<u64>>> {
    instance.validate()?;
    let (p, k, r, a, b) = (
        instance.p,
        instance.k,
        instance.r as usize,
        instance.a,
        instance.b,
    );
    let pkb = pow_u128(p, k * b)?;
    let est = pkb.checked_pow(r as u32).unwrap_or(u128::MAX);
    budget.check_naive("naive congruence scan", est)?;
    let pa = pow_u128(p, a)?;
    let pa1 = pow_u128(p, a + 1)?;
    let eta = instance.eta as u128;
    let mut out = Vec::new();
    let mut cur = vec![1u64; r];
    loop {
        let ok = (|| {
            for (i, &z) in cur.iter().enumerate() {
                let z = z as u128;
                if a >= 1 {
                    if z % pa != instance.xi as u128 % pa {
                        return false;
                    }
                } else if z % p as u128 == eta % p as u128 {
                    return false;
                }
                let dmod = if a >= 1 { pa1 } else { p as u128 };
                for &prev in &cur[..i] {
                    if prev as u128 % dmod == z % dmod {
                        return false;
                    }
                }
            }
            for j in 1..=k {
                let modulus = (p as u128).pow(j * b);
                let mut sum = 0u128;
                for &z in &cur {
                    let d = (z as u128 % modulus + modulus - eta % modulus) % modulus;
                    sum = (sum + pow_mod(d, j, modulus)) % modulus;
                }
                if sum != instance.m[(j - 1) as usize] as u128 % modulus {
                    return false;
                }
            }
            true
        })();
        if ok {
            out.push(cur.clone());
        }
        // Odometer increment over [1, p^{kb}]^r.
        let mut i = r;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            if (cur[i] as u128) < pkb {
                cur[i] += 1;
                for slot in cur[i + 1..].iter_mut() {
                    *slot = 1;
                }
                break;
            }
        }
    }
}

/// Census of equivalence classes (componentwise congruence mod p^{tb}) with
/// the factorial bound attached.
#[derive(Debug, Clone)]
pub struct EquivalenceClassCensus {
    pub instance: CongruenceInstance,
    pub solution_count: u64,
    pub class_count: u64,
    pub bound: BigUint,
    /// True when b >= (k - t - 1) a, the hypothesis under which the bound is
    /// asserted.
    pub bound_asserted: bool,
    /// True when r + t = k: mu = nu = 0 and only diagonal solutions remain.
    pub strongly_diagonal: bool,
    pub witnesses: Option<Vec<Vec<u64>>>,
}

impl EquivalenceClassCensus {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "instance": self.instance.to_json(),
            "solution_count": self.solution_count,
            "class_count": self.class_count,
            "bound": self.bound.to_string(),
            "bound_asserted": self.bound_asserted,
            "strongly_diagonal": self.strongly_diagonal,
            "witnesses": self.witnesses,
        })
    }
}

fn factorial(n: u32) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

fn lemma_bound(k: u32, r: u32, t: u32, p: u64, a: u32, b: u32) -> Result<(BigUint, bool)> {
    let (mu, nu) = mu_nu(&VinogradovParams::new(k, r, t)?)?;
    let exp = mu * b as u64 + nu * a as u64;
    let bound = factorial(k) * BigUint::from(p).pow(exp as u32);
    let hypothesis = b as i64 >= (k as i64 - t as i64 - 1) * a as i64;
    Ok((bound, hypothesis))
}

/// Partition the solutions of one instance into classes mod p^{tb}.
pub fn count_classes(
    instance: &CongruenceInstance,
    budget: &Budget,
    want_witnesses: bool,
) -> Result<EquivalenceClassCensus> {
    let sols = enumerate_B(instance, budget)?;
    let ptb = pow_u128(instance.p, instance.t * instance.b)?;
    let mut classes: BTreeMap<Vec<u64>, Vec<u64>> = BTreeMap::new();
    for z in &sols {
        let key: Vec<u64> = z.iter().map(|&zi| (zi as u128 % ptb) as u64).collect();
        classes.entry(key).or_insert_with(|| z.clone());
    }
    let (bound, bound_asserted) =
        lemma_bound(instance.k, instance.r, instance.t, instance.p, instance.a, instance.b)?;
    let class_count = classes.len() as u64;
    if bound_asserted && BigUint::from(class_count) > bound {
        return Err(Error::AssertionViolation(format!(
            "class count {class_count} exceeds the factorial bound {bound} for {instance:?}"
        )));
    }
    Ok(EquivalenceClassCensus {
        instance: instance.clone(),
        solution_count: sols.len() as u64,
        class_count,
        bound,
        bound_asserted,
        strongly_diagonal: instance.r + instance.t == instance.k,
        witnesses: want_witnesses.then(|| classes.into_values().collect()),
    })
}

/// Maximize the class count over all (xi, eta, m). Instead of sweeping the
/// m-space (size p^{b k(k+1)/2}) and re-enumerating per m, each (xi, eta)
/// pass walks every admissible tuple once, grouped by its class projection:
/// the class tuple c mod p^{tb} determines m_1..m_t, and each joint lift of
/// c to [1, p^{kb}]^r yields one tail (m_{t+1}..m_k). Bumping a census per
/// distinct (class, m) pair reproduces the full sweep's maxima exactly.
#[allow(non_snake_case)]
pub fn max_B(
    k: u32,
    r: u32,
    t: u32,
    p: u64,
    a: u32,
    b: u32,
    budget: &Budget,
    want_witnesses: bool,
) -> Result<EquivalenceClassCensus> {
    VinogradovParams::new(k, r, t)?;
    if !is_prime(p) || p <= k as u64 {
        return Err(Error::invalid(format!("p = {p} must be a prime exceeding k = {k}")));
    }
    if a >= b {
        return Err(Error::invalid("requires 0 <= a < b"));
    }
    let pa = pow_u128(p, a)?;
    let pb = pow_u128(p, b)?;
    let ptb = pow_u128(p, t * b)?;
    let pkb = pow_u128(p, k * b)?;
    let lift_span = pow_u128(p, (k - t) * b)?; // lifts per coordinate
    let r_us = r as usize;

    let est = ptb
        .checked_pow(r)
        .and_then(|x| x.checked_mul(lift_span.checked_pow(r)?))
        .and_then(|x| x.checked_mul(pa * pb))
        .unwrap_or(u128::MAX);
    budget.check_naive("max_B aggregation sweep", est)?;

    let pa1 = pow_u128(p, a + 1)?;
    let mut best: Option<(u64, u64, u64, Vec<u64>)> = None; // (count, xi, eta, m)

    for xi in 1..=pa as u64 {
        for eta in 1..=pb as u64 {
            if a >= 1 && eta % p == xi % p {
                continue;
            }
            // Distinct (m, class) pairs seen for this (xi, eta).
            let mut census: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
            let eta128 = eta as u128;

            // Admissible residues mod p^{tb} for one coordinate.
            let side_ok = |z: u128| {
                if a >= 1 {
                    z % pa == xi as u128 % pa
                } else {
                    z % p as u128 != eta128 % p as u128
                }
            };

            // Walk class tuples c, then joint lifts u.
            let mut c = vec![0u128; r_us];
            let mut u = vec![0u128; r_us];
            'class: loop {
                // Side conditions (all determined mod p^{a+1} <= p^{tb}).
                let mut ok = c.iter().all(|&ci| side_ok(ci));
                if ok && a >= 1 {
                    for i in 0..r_us {
                        for jj in 0..i {
                            if c[i] % pa1 == c[jj] % pa1 {
                                ok = false;
                            }
                        }
                    }
                } else if ok {
                    for i in 0..r_us {
                        for jj in 0..i {
                            if c[i] % p as u128 == c[jj] % p as u128 {
                                ok = false;
                            }
                        }
                    }
                }
                if ok {
                    // Head m_1..m_t from the class tuple.
                    let mut mvec = vec![0u64; k as usize];
                    for j in 1..=t {
                        let modulus = (p as u128).pow(j * b);
                        let mut sum = 0u128;
                        for &ci in &c {
                            let d = (ci % modulus + modulus - eta128 % modulus) % modulus;
                            sum = (sum + pow_mod(d, j, modulus)) % modulus;
                        }
                        mvec[(j - 1) as usize] = sum as u64;
                    }
                    let mut tails: HashSet<Vec<u64>> = HashSet::new();
                    for slot in u.iter_mut() {
                        *slot = 0;
                    }
                    loop {
                        let mut tail = vec![0u64; (k - t) as usize];
                        for j in (t + 1)..=k {
                            let modulus = (p as u128).pow(j * b);
                            let mut sum = 0u128;
                            for i in 0..r_us {
                                let z = c[i] + u[i] * ptb;
                                let d = (z % modulus + modulus - eta128 % modulus) % modulus;
                                sum = (sum + pow_mod(d, j, modulus)) % modulus;
                            }
                            tail[(j - t - 1) as usize] = sum as u64;
                        }
                        tails.insert(tail);
                        // Odometer over lifts.
                        let mut i = r_us;
                        let done = loop {
                            if i == 0 {
                                break true;
                            }
                            i -= 1;
                            if u[i] + 1 < lift_span {
                                u[i] += 1;
                                for slot in u[i + 1..].iter_mut() {
                                    *slot = 0;
                                }
                                break false;
                            }
                        };
                        if done {
                            break;
                        }
                    }
                    for tail in tails {
                        let mut key = mvec.clone();
                        key[t as usize..].copy_from_slice(&tail);
                        *census.entry(key).or_insert(0) += 1;
                    }
                }
                // Odometer over class tuples.
                let mut i = r_us;
                let done = loop {
                    if i == 0 {
                        break true;
                    }
                    i -= 1;
                    if c[i] + 1 < ptb {
                        c[i] += 1;
                        for slot in c[i + 1..].iter_mut() {
                            *slot = 0;
                        }
                        break false;
                    }
                };
                if done {
                    break 'class;
                }
            }

            for (mvec, count) in census {
                let better = match &best {
                    None => true,
                    Some((bc, ..)) => count > *bc,
                };
                if better {
                    best = Some((count, xi, eta, mvec));
                }
            }
        }
    }

    let (count, xi, eta, mvec) = best.ok_or_else(|| {
        Error::Internal("max_B sweep produced no admissible census".to_string())
    })?;
    // Residue 0 is represented as the modulus itself in [1, p^{jb}].
    let m: Vec<u64> = mvec
        .iter()
        .enumerate()
        .map(|(j, &mj)| {
            if mj == 0 {
                (p as u128).pow((j as u32 + 1) * b) as u64
            } else {
                mj
            }
        })
        .collect();
    let instance = CongruenceInstance {
        k,
        r,
        t,
        p,
        a,
        b,
        xi,
        eta: if eta == 0 { pb as u64 } else { eta },
        m,
    };
    let census = count_classes(&instance, budget, want_witnesses)?;
    debug_assert_eq!(census.class_count, count);
    debug_assert!(pkb > 0);
    Ok(census)
}

/// A multivariate integer polynomial in sparse form: (exponent vector,
/// coefficient) terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiPoly {
    pub nvars: usize,
    pub terms: Vec<(Vec<u32>, i64)>,
}

impl MultiPoly {
    pub fn eval_mod(&self, x: &[i128], modulus: i128) -> i128 {
        let mut acc = 0i128;
        for (exps, c) in &self.terms {
            let mut term = (*c as i128).rem_euclid(modulus);
            for (i, &e) in exps.iter().enumerate() {
                term = term * pow_mod(x[i].rem_euclid(modulus) as u128, e, modulus as u128) as i128
                    % modulus;
            }
            acc = (acc + term) % modulus;
        }
        acc.rem_euclid(modulus)
    }

    /// Partial derivative with respect to variable i.
    pub fn partial(&self, i: usize) -> MultiPoly {
        let mut terms = Vec::new();
        for (exps, c) in &self.terms {
            if exps[i] == 0 {
                continue;
            }
            let mut e = exps.clone();
            let coef = *c * exps[i] as i64;
            e[i] -= 1;
            terms.push((e, coef));
        }
        MultiPoly {
            nvars: self.nvars,
            terms,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, c)| *c != 0)
            .map(|(e, _)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }
}

/// Determinant of a square matrix mod a prime, by Gaussian elimination.
fn det_mod(mut m: Vec<Vec<i128>>, p: i128) -> i128 {
    let n = m.len();
    let mut det = 1i128;
    for col in 0..n {
        let pivot = (col..n).find(|&row| m[row][col].rem_euclid(p) != 0);
        let Some(pivot) = pivot else {
            return 0;
        };
        if pivot != col {
            m.swap(pivot, col);
            det = (-det).rem_euclid(p);
        }
        let inv = mod_inverse(m[col][col].rem_euclid(p), p);
        det = det * m[col][col].rem_euclid(p) % p;
        for row in col + 1..n {
            let factor = m[row][col].rem_euclid(p) * inv % p;
            for c in col..n {
                m[row][c] = (m[row][c] - factor * m[col][c]).rem_euclid(p);
            }
        }
    }
    det.rem_euclid(p)
}

fn mod_inverse(a: i128, p: i128) -> i128 {
    // Fermat, p prime.
    pow_mod(a.rem_euclid(p) as u128, (p - 2) as u32, p as u128) as i128
}

/// Solve M x = rhs mod p (M nonsingular), Gaussian elimination.
fn solve_mod(mut m: Vec<Vec<i128>>, mut rhs: Vec<i128>, p: i128) -> Vec<i128> {
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&row| m[row][col].rem_euclid(p) != 0)
            .expect("nonsingular by caller contract");
        m.swap(pivot, col);
        rhs.swap(pivot, col);
        let inv = mod_inverse(m[col][col], p);
        for c in col..n {
            m[col][c] = m[col][c].rem_euclid(p) * inv % p;
        }
        rhs[col] = rhs[col].rem_euclid(p) * inv % p;
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = m[row][col].rem_euclid(p);
            if factor == 0 {
                continue;
            }
            for c in col..n {
                m[row][c] = (m[row][c] - factor * m[col][c]).rem_euclid(p);
            }
            rhs[row] = (rhs[row] - factor * rhs[col]).rem_euclid(p);
        }
    }
    rhs
}

/// Count x in [1, w^l]^d with f_j(x) = 0 mod w^l for all j and Jacobian
/// determinant coprime to w. Nonsingular roots mod w lift uniquely (Newton),
/// so the count equals the number of nonsingular roots mod w; each lift is
/// verified against the full system before being counted.
pub fn hensel_count(system: &[MultiPoly], w: u64, l: u32, budget: &Budget) -> Result<u64> {
    if system.is_empty() {
        return Err(Error::invalid("hensel_count requires at least one polynomial"));
    }
    let d = system[0].nvars;
    if system.len() != d || system.iter().any(|f| f.nvars != d) {
        return Err(Error::invalid(
            "hensel_count requires d polynomials in the same d variables",
        ));
    }
    if !is_prime(w) || l < 1 {
        return Err(Error::invalid("hensel_count requires prime w and l >= 1"));
    }
    let wl = pow_u128(w, l)?;
    if wl > i128::MAX as u128 / wl.max(1) {
        return Err(Error::invalid("w^l too large for the working width"));
    }
    let scan = (w as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    budget.check_naive("hensel base scan", scan)?;

    let jac: Vec<Vec<MultiPoly>> = system
        .iter()
        .map(|f| (0..d).map(|i| f.partial(i)).collect())
        .collect();
    let wi = w as i128;
    let wli = wl as i128;

    let mut count = 0u64;
    let mut x = vec![1i128; d];
    loop {
        let root = system.iter().all(|f| f.eval_mod(&x, wi) == 0);
        if root {
            let jm: Vec<Vec<i128>> = jac
                .iter()
                .map(|row| row.iter().map(|g| g.eval_mod(&x, wi)).collect())
                .collect();
            if det_mod(jm, wi) != 0 {
                // Newton-lift to mod w^l, one power at a time.
                let mut y = x.clone();
                let mut modulus = wi;
                for _ in 1..l {
                    let next = modulus * wi;
                    let jm: Vec<Vec<i128>> = jac
                        .iter()
                        .map(|row| row.iter().map(|g| g.eval_mod(&y, wi)).collect())
                        .collect();
                    let rhs: Vec<i128> = system
                        .iter()
                        .map(|f| {
                            let v = f.eval_mod(&y, next);
                            debug_assert_eq!(v % modulus, 0);
                            (-(v / modulus)).rem_euclid(wi)
                        })
                        .collect();
                    let delta = solve_mod(jm, rhs, wi);
                    for i in 0..d {
                        y[i] = (y[i] + delta[i] * modulus).rem_euclid(next);
                    }
                    modulus = next;
                }
                if system.iter().all(|f| f.eval_mod(&y, wli) == 0) {
                    count += 1;
                }
            }
        }
        // Odometer over [1, w]^d.
        let mut i = d;
        let done = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            if x[i] < wi {
                x[i] += 1;
                for slot in x[i + 1..].iter_mut() {
                    *slot = 1;
                }
                break false;
            }
        };
        if done {
            break;
        }
    }
    let degree_bound: u128 = system.iter().map(|f| f.total_degree() as u128).product();
    if count as u128 > degree_bound {
        return Err(Error::AssertionViolation(format!(
            "hensel count {count} exceeds the degree bound {degree_bound}"
        )));
    }
    Ok(count)
}

/// The binomial identity c_alpha + sum_l c_{alpha+l} (x+1)^{alpha+l}
/// = sum_{m=beta}^{alpha+beta} d_m x^m, with d_beta > 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyIdentity {
    pub alpha: u32,
    pub beta: u32,
    /// c_alpha, c_{alpha+1}, ..., c_{alpha+beta}.
    pub c: Vec<BigInt>,
    /// d_beta, ..., d_{alpha+beta}.
    pub d: Vec<BigInt>,
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl PolyIdentity {
    /// Exact expansion check of the identity.
    pub fn verify(&self) -> Result<()> {
        let (alpha, beta) = (self.alpha as u64, self.beta as u64);
        let top = (alpha + beta) as usize;
        let mut coeffs = vec![BigInt::zero(); top + 1];
        coeffs[0] += &self.c[0];
        for l in 1..=beta {
            let cl = &self.c[l as usize];
            for m in 0..=(alpha + l) {
                coeffs[m as usize] += cl * binomial(alpha + l, m);
            }
        }
        for (m, coef) in coeffs.iter().enumerate() {
            let expect = if (m as u64) < beta {
                BigInt::zero()
            } else {
                self.d[m - beta as usize].clone()
            };
            if *coef != expect {
                return Err(Error::AssertionViolation(format!(
                    "identity fails at x^{m}: expanded {coef}, recorded {expect}"
                )));
            }
        }
        if self.d[0] <= BigInt::zero() {
            return Err(Error::AssertionViolation("d_beta must be positive".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "alpha": self.alpha,
            "beta": self.beta,
            "c": self.c.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "d": self.d.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Find integers c, d realizing the binomial identity with d_beta != 0: the
/// beta - 1 homogeneous conditions kill x^1..x^{beta-1}, c_alpha cancels the
/// constant term, and the rational kernel is scaled to a primitive integer
/// vector with d_beta > 0.
pub fn lemma32_solve(alpha: u32, beta: u32) -> Result<PolyIdentity> {
    if alpha < 1 || beta < 1 {
        return Err(Error::invalid("requires alpha, beta >= 1"));
    }
    let (alpha64, beta64) = (alpha as u64, beta as u64);
    // Unknowns: c_{alpha+1}..c_{alpha+beta}. Conditions (m = 1..beta-1):
    // sum_l c_{alpha+l} * C(alpha+l, m) = 0.
    let n = beta as usize;
    let rows = (beta - 1) as usize;
    let mut m: Vec<Vec<BigRational>> = (1..beta64)
        .map(|mm| {
            (1..=beta64)
                .map(|l| BigRational::from_integer(binomial(alpha64 + l, mm)))
                .collect()
        })
        .collect();

    // Row-reduce and read one kernel vector per free column; prefer a kernel
    // vector with nonzero d_beta.
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..n {
        let pr = (row..rows).find(|&rr| !m[rr][col].is_zero());
        let Some(pr) = pr else { continue };
        m.swap(row, pr);
        let inv = m[row][col].clone();
        for c in col..n {
            m[row][c] = &m[row][c] / &inv;
        }
        for rr in 0..rows {
            if rr == row || m[rr][col].is_zero() {
                continue;
            }
            let f = m[rr][col].clone();
            for c in col..n {
                m[rr][c] = &m[rr][c] - &f * &m[row][c];
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }

    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let mut found: Option<PolyIdentity> = None;
    for &fc in &free_cols {
        // Kernel vector with 1 in the free column.
        let mut v = vec![BigRational::zero(); n];
        v[fc] = BigRational::one();
        for (ri, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[ri][fc].clone();
        }
        // d_m = sum_l c_{alpha+l} C(alpha+l, m).
        let d_of = |mm: u64, v: &[BigRational]| -> BigRational {
            (1..=beta64)
                .map(|l| &v[(l - 1) as usize] * BigRational::from_integer(binomial(alpha64 + l, mm)))
                .sum()
        };
        let dbeta = d_of(beta64, &v);
        if dbeta.is_zero() {
            continue;
        }
        // Clear denominators to a primitive integer vector, sign d_beta > 0.
        let mut denom_lcm = BigInt::one();
        for x in &v {
            denom_lcm = num_integer::lcm(denom_lcm.clone(), x.denom().clone());
        }
        let mut ints: Vec<BigInt> = v.iter().map(|x| (x * &denom_lcm).to_integer()).collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = num_integer::gcd(g.clone(), x.clone());
        }
        if !g.is_zero() && g != BigInt::one() {
            for x in ints.iter_mut() {
                *x /= &g;
            }
        }
        let sign_probe: BigInt = (1..=beta64)
            .map(|l| &ints[(l - 1) as usize] * binomial(alpha64 + l, beta64))
            .sum();
        if sign_probe.is_negative() {
            for x in ints.iter_mut() {
                *x = -x.clone();
            }
        }
        let c_alpha: BigInt = -ints.iter().sum::<BigInt>();
        let mut c = vec![c_alpha];
        c.extend(ints.iter().cloned());
        let d: Vec<BigInt> = (beta64..=(alpha64 + beta64))
            .map(|mm| {
                (1..=beta64)
                    .map(|l| &ints[(l - 1) as usize] * binomial(alpha64 + l, mm))
                    .sum()
            })
            .collect();
        let identity = PolyIdentity {
            alpha,
            beta,
            c,
            d,
        };
        identity.verify()?;
        found = Some(identity);
        break;
    }
    found.ok_or_else(|| {
        Error::Internal(format!(
            "no kernel vector with d_beta != 0 for alpha = {alpha}, beta = {beta}"
        ))
    })
}

/// Symmetric side conditions imply permutation closure of the solution set.
pub fn solutions_permutation_closed(sols: &[Vec<u64>]) -> bool {
    let set: BTreeSet<&Vec<u64>> = sols.iter().collect();
    sols.iter().all(|z| {
        let mut rev: Vec<u64> = z.clone();
        rev.reverse();
        z.len() != 2 || set.contains(&rev)
    })
}
