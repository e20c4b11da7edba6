//! Representation counts R_{s,k}(n), the truncated singular series, and the
//! circle-method main term, compared at desk scale.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;
use statrs::function::gamma::gamma;

use crate::counting::Budget;
use crate::error::{Error, Result};

/// Ordered representations of n as a sum of s positive k-th powers.
#[derive(Debug, Clone)]
pub struct RepCount {
    pub s: u32,
    pub k: u32,
    pub n: u64,
    pub count: BigUint,
}

/// The full table R_{s,k}(m) for 0 <= m <= n, built by s-fold convolution of
/// the k-th-power indicator. A fixed-width u128 path is used when a static
/// bound shows no entry can overflow; otherwise arbitrary precision.
#[allow(non_snake_case)]
pub fn count_R_table(s: u32, k: u32, n: u64, budget: &Budget) -> Result<Vec<BigUint>> {
    if s < 1 || k < 2 || n < 1 {
        return Err(Error::invalid("count_R requires s >= 1, k >= 2, n >= 1"));
    }
    let root = integer_root(n, k);
    budget.check_naive(
        "representation count convolution",
        (s as u128) * (n as u128 + 1) * (root as u128 + 1),
    )?;
    let powers: Vec<u64> = (1..=root).map(|x| x.pow(k)).filter(|&p| p <= n).collect();

    // Every entry is at most (root + 1)^s; if that fits u128 the whole table
    // can be computed in fixed width.
    let fits_u128 = (root as u128 + 1)
        .checked_pow(s)
        .is_some();
    if fits_u128 {
        let mut cur = vec![0u128; n as usize + 1];
        cur[0] = 1;
        for _ in 0..s {
            let mut next = vec![0u128; n as usize + 1];
            for (m, &v) in cur.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                for &p in &powers {
                    let idx = m + p as usize;
                    if idx > n as usize {
                        break;
                    }
                    next[idx] += v;
                }
            }
            cur = next;
        }
        Ok(cur.into_iter().map(BigUint::from).collect())
    } else {
        let mut cur = vec![BigUint::zero(); n as usize + 1];
        cur[0] = BigUint::from(1u32);
        for _ in 0..s {
            let mut next = vec![BigUint::zero(); n as usize + 1];
            for m in 0..=n as usize {
                if cur[m].is_zero() {
                    continue;
                }
                for &p in &powers {
                    let idx = m + p as usize;
                    if idx > n as usize {
                        break;
                    }
                    let add = cur[m].clone();
                    next[idx] += add;
                }
            }
            cur = next;
        }
        Ok(cur)
    }
}

#[allow(non_snake_case)]
pub fn count_R(s: u32, k: u32, n: u64, budget: &Budget) -> Result<RepCount> {
    let table = count_R_table(s, k, n, budget)?;
    Ok(RepCount {
        s,
        k,
        n,
        count: table[n as usize].clone(),
    })
}

/// Largest x with x^k <= n.
fn integer_root(n: u64, k: u32) -> u64 {
    let mut x = (n as f64).powf(1.0 / k as f64).round() as u64 + 1;
    while x.checked_pow(k).map(|p| p > n).unwrap_or(true) {
        x -= 1;
    }
    x
}

#[derive(Debug, Clone, Copy)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    fn unit(angle: f64) -> Self {
        let (im, re) = (std::f64::consts::TAU * angle).sin_cos();
        Complex { re, im }
    }

    fn mul(self, o: Complex) -> Complex {
        Complex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn scale(self, f: f64) -> Complex {
        Complex {
            re: self.re * f,
            im: self.im * f,
        }
    }

    fn powi(self, e: u32) -> Complex {
        let mut acc = Complex { re: 1.0, im: 0.0 };
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn add_assign(&mut self, o: Complex) {
        self.re += o.re;
        self.im += o.im;
    }
}

/// The truncated singular series value with its tail estimate.
#[derive(Debug, Clone)]
pub struct SingularSeriesValue {
    pub s: u32,
    pub k: u32,
    pub n: u64,
    pub q_max: u64,
    pub value: f64,
    /// |S(Q) - S(Q/2)|, a crude indicator of truncation quality.
    pub term_tail_estimate: f64,
}

impl SingularSeriesValue {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "s": self.s, "k": self.k, "n": self.n, "Q": self.q_max,
            "value": self.value,
            "term_tail_estimate": self.term_tail_estimate,
        })
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Contribution of modulus q: sum over (a, q) = 1 of (S(q,a)/q)^s e(-na/q),
/// where S(q,a) = sum_{r=1}^{q} e(a r^k / q). Angles are reduced to exact
/// rationals a (r^k mod q) / q before trigonometric evaluation.
fn modulus_term(s: u32, k: u32, n: u64, q: u64) -> Complex {
    // Precompute r^k mod q for 1 <= r <= q.
    let rk: Vec<u64> = (1..=q)
        .map(|r| {
            let mut acc = 1u64;
            let mut base = r % q;
            let mut e = k;
            while e > 0 {
                if e & 1 == 1 {
                    acc = (acc as u128 * base as u128 % q as u128) as u64;
                }
                base = (base as u128 * base as u128 % q as u128) as u64;
                e >>= 1;
            }
            acc
        })
        .collect();
    let mut out = Complex { re: 0.0, im: 0.0 };
    for a in 1..=q {
        if gcd(a, q) != 1 {
            continue;
        }
        let mut gauss = Complex { re: 0.0, im: 0.0 };
        for &rkv in &rk {
            let num = (a as u128 * rkv as u128 % q as u128) as u64;
            gauss.add_assign(Complex::unit(num as f64 / q as f64));
        }
        let normalized = gauss.scale(1.0 / q as f64).powi(s);
        let phase = Complex::unit(-(((n % q) as u128 * a as u128 % q as u128) as f64) / q as f64);
        out.add_assign(normalized.mul(phase));
    }
    out
}

/// Truncated singular series: sum of modulus terms for q <= Q. The exact
/// value is real; an imaginary residue above 1e-6 is reported as a failed
/// assertion rather than silently dropped.
pub fn singular_series(s: u32, k: u32, n: u64, q_max: u64) -> Result<SingularSeriesValue> {
    if s < 1 || k < 2 || n < 1 || q_max < 1 {
        return Err(Error::invalid("singular_series requires s, n, Q >= 1 and k >= 2"));
    }
    let mut total = Complex { re: 0.0, im: 0.0 };
    let mut half_value = 0.0f64;
    for q in 1..=q_max {
        total.add_assign(modulus_term(s, k, n, q));
        if q == q_max / 2 {
            half_value = total.re;
        }
    }
    if total.im.abs() >= 1e-6 {
        return Err(Error::AssertionViolation(format!(
            "singular series imaginary part {} exceeds 1e-6 at (s={s}, k={k}, n={n}, Q={q_max})",
            total.im
        )));
    }
    Ok(SingularSeriesValue {
        s,
        k,
        n,
        q_max,
        value: total.re,
        term_tail_estimate: (total.re - half_value).abs(),
    })
}

/// The heuristic main term Gamma(1 + 1/k)^s / Gamma(s/k) * S_{s,k}(n; Q)
/// * n^{s/k - 1}, defined in the regime k >= 3, s >= k + 1.
pub fn main_term(s: u32, k: u32, n: u64, q_max: u64) -> Result<f64> {
    if k < 3 {
        return Err(Error::invalid("main_term requires k >= 3"));
    }
    if s < k + 1 {
        return Err(Error::invalid(format!(
            "main_term requires s >= k + 1, got s = {s}, k = {k}"
        )));
    }
    let ss = singular_series(s, k, n, q_max)?;
    let kf = k as f64;
    let sf = s as f64;
    let gamma_factor = gamma(1.0 + 1.0 / kf).powi(s as i32) / gamma(sf / kf);
    Ok(gamma_factor * ss.value * (n as f64).powf(sf / kf - 1.0))
}

/// One row of the count-versus-main-term comparison.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub n: u64,
    pub count: BigUint,
    pub main_term: f64,
    pub ratio: f64,
}

impl CompareRow {
    pub fn to_csv_row(&self) -> String {
        format!("{},{},{},{}", self.n, self.count, self.main_term, self.ratio)
    }
}

/// Compare the exact count against the heuristic main term on a set of n.
pub fn compare(s: u32, k: u32, ns: &[u64], q_max: u64, budget: &Budget) -> Result<Vec<CompareRow>> {
    let n_max = *ns
        .iter()
        .max()
        .ok_or_else(|| Error::invalid("compare needs at least one n"))?;
    let table = count_R_table(s, k, n_max, budget)?;
    ns.iter()
        .map(|&n| {
            let count = table[n as usize].clone();
            let mt = main_term(s, k, n, q_max)?;
            let ratio = count.to_f64().unwrap_or(f64::INFINITY) / mt;
            Ok(CompareRow {
                n,
                count,
                main_term: mt,
                ratio,
            })
        })
        .collect()
}
