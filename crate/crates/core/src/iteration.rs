//! Exact replay of the congruencing recursion: the integer sequences a, b,
//! c, h and the rational sequences gamma, psi, together with the window
//! bounds, the closed forms, and the final exponent cap.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::json;

use crate::error::{Error, Result};
use crate::params::VinogradovParams;
use crate::rational::{rat_int, Rat};

/// Configuration for one replay: the parameter triple, the depth N, and the
/// sequence of h-choices (h_{-1} first, then h_0..h_{N-1}).
#[derive(Debug, Clone)]
pub struct IterationConfig {
    pub params: VinogradovParams,
    pub n_max: u32,
    /// h_{-1} in {0,1,2,3}; h_n in [0, 15(t-1) b_n] for n >= 0.
    pub h_choices: Vec<BigInt>,
}

/// One step of the recursion, all values exact.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub n: u32,
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub gamma: Rat,
    pub psi: Rat,
}

impl IterationState {
    pub fn to_csv_row(&self, h: Option<&BigInt>) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.a,
            self.b,
            h.map(|v| v.to_string()).unwrap_or_default(),
            self.c,
            self.gamma.numer(),
            self.gamma.denom(),
            self.psi.numer(),
            self.psi.denom(),
        )
    }
}

/// theta = (16 t)^{-N-1} and delta = (1000 N t^N)^{-1} theta, with the
/// derived comparisons 4 (16 t)^N <= (2 theta)^{-1} and (via the closed form
/// for c) 3 t^N <= (2 delta)^{-1} theta checked exactly.
pub fn theta_delta(t: u32, n: u32) -> Result<(Rat, Rat)> {
    if t < 2 || n < 1 {
        return Err(Error::invalid("theta_delta requires t >= 2 and N >= 1"));
    }
    let sixteen_t = BigInt::from(16u32 * t);
    let theta = Rat::new(BigInt::one(), sixteen_t.pow(n + 1));
    let tn = BigInt::from(t).pow(n);
    let delta = theta.clone() * Rat::new(BigInt::one(), BigInt::from(1000u32 * n) * &tn);
    // 4 (16 t)^N <= (2 theta)^{-1} = (16 t)^{N+1} / 2.
    let lhs = rat_int(4) * Rat::from_integer(sixteen_t.pow(n));
    let inv_2theta = Rat::new(BigInt::one(), BigInt::from(2)) / theta.clone();
    if lhs > inv_2theta {
        return Err(Error::AssertionViolation(format!(
            "4 (16 t)^N > (2 theta)^(-1) at t = {t}, N = {n}"
        )));
    }
    // c_N <= 3 t^N <= (2 delta)^{-1} theta = 500 N t^N.
    let c_cap = rat_int(3) * Rat::from_integer(tn.clone());
    let rhs = Rat::new(BigInt::one(), BigInt::from(2)) / delta.clone() * theta.clone();
    if c_cap > rhs {
        return Err(Error::AssertionViolation(format!(
            "3 t^N > (2 delta)^(-1) theta at t = {t}, N = {n}"
        )));
    }
    Ok((theta, delta))
}

/// c_n = t^n + t (t^n - 1)/(t - 1), which is at most 3 t^n.
pub fn c_closed_form(t: u32, n: u32) -> BigInt {
    let tb = BigInt::from(t);
    let tn = tb.pow(n);
    &tn + &tb * (&tn - BigInt::one()) / (&tb - BigInt::one())
}

/// gamma_m = (4/3) s b_m - s b_{m-1} - (4/3) s t^m for m >= 1.
pub fn gamma_closed_form(s: u64, t: u32, m: u32, b_m: &BigInt, b_m1: &BigInt) -> Rat {
    let s_rat = rat_int(s as i64);
    let four_thirds = Rat::new(BigInt::from(4), BigInt::from(3));
    &four_thirds * &s_rat * Rat::from_integer(b_m.clone())
        - &s_rat * Rat::from_integer(b_m1.clone())
        - four_thirds * s_rat * Rat::from_integer(BigInt::from(t).pow(m))
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.n_max < 1 {
            return Err(Error::invalid("requires N >= 1"));
        }
        if self.h_choices.len() != self.n_max as usize + 1 {
            return Err(Error::invalid(format!(
                "need h_(-1) plus h_0..h_(N-1): {} values, got {}",
                self.n_max + 1,
                self.h_choices.len()
            )));
        }
        let hm1 = &self.h_choices[0];
        if hm1.is_negative() || *hm1 > BigInt::from(3) {
            return Err(Error::invalid("h_(-1) must lie in {0, 1, 2, 3}"));
        }
        // The upper bounds for h_n depend on b_n and are checked during the
        // replay, where b_n is available.
        Ok(())
    }

    /// Draw a valid random h-vector for the given (params, N) from a seeded
    /// generator, so failures replay exactly.
    pub fn random(params: VinogradovParams, n_max: u32, rng: &mut impl Rng) -> Self {
        let t = params.t;
        let mut h = vec![BigInt::from(rng.gen_range(0..=3u32))];
        let mut b = BigInt::one() + &h[0];
        for _ in 0..n_max {
            let cap = BigInt::from(15 * (t - 1)) * &b;
            let cap_u = cap.to_u64().unwrap_or(u64::MAX);
            let hn = BigInt::from(rng.gen_range(0..=cap_u.min(1 << 40)));
            b = BigInt::from(t) * &b + &hn;
            h.push(hn);
        }
        IterationConfig {
            params,
            n_max,
            h_choices: h,
        }
    }
}

/// Replay the recursion exactly and assert the window at every step:
/// 0 <= a_n < b_n, psi_n >= 0, gamma_n >= -r b_n, 0 <= c_n <= (2 delta)^{-1}
/// theta, and b_n <= (2 theta)^{-1} at the final step (b_n <= (32 t theta)^{-1}
/// strictly before it).
pub fn run_iteration(config: &IterationConfig) -> Result<Vec<IterationState>> {
    config.validate()?;
    let p = &config.params;
    let (t, r) = (p.t, p.r);
    let s = p.s();
    let n_max = config.n_max;
    let (theta, delta) = theta_delta(t, n_max)?;
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let b_cap_strict = Rat::one() / (rat_int(32 * t as i64) * &theta); // for n < N
    let b_cap_final = &half / &theta; // for n = N
    let c_cap = &half / &delta * &theta;
    let four_thirds = Rat::new(BigInt::from(4), BigInt::from(3));
    let s_rat = rat_int(s as i64);

    let hm1 = &config.h_choices[0];
    let mut state = IterationState {
        n: 0,
        a: BigInt::zero(),
        b: BigInt::one() + hm1,
        c: BigInt::one(),
        gamma: &four_thirds * &s_rat * Rat::from_integer(hm1.clone()),
        psi: Rat::zero(),
    };
    let mut out = Vec::with_capacity(n_max as usize + 1);

    for n in 0..=n_max {
        // Window assertions.
        let b_rat = Rat::from_integer(state.b.clone());
        let fail = |what: &str| {
            Err(Error::AssertionViolation(format!(
                "window fails at n = {n}: {what} (t = {t}, r = {r}, N = {n_max})"
            )))
        };
        if state.a.is_negative() || state.a >= state.b {
            return fail("0 <= a_n < b_n");
        }
        if n < n_max && b_rat > b_cap_strict {
            return fail("b_n <= (32 t theta)^(-1)");
        }
        if n == n_max && b_rat > b_cap_final {
            return fail("b_N <= (2 theta)^(-1)");
        }
        if state.psi.is_negative() {
            return fail("psi_n >= 0");
        }
        if state.gamma < -rat_int(r as i64) * Rat::from_integer(state.b.clone()) {
            return fail("gamma_n >= -r b_n");
        }
        if state.c.is_negative() || Rat::from_integer(state.c.clone()) > c_cap {
            return fail("0 <= c_n <= (2 delta)^(-1) theta");
        }
        out.push(state.clone());
        if n == n_max {
            break;
        }

        let h = &config.h_choices[n as usize + 1];
        let h_cap = BigInt::from(15 * (t - 1)) * &state.b;
        if h.is_negative() || *h > h_cap {
            return Err(Error::invalid(format!(
                "h_{n} = {h} outside [0, 15(t-1) b_{n}] = [0, {h_cap}]"
            )));
        }
        let tb = BigInt::from(t);
        let next = IterationState {
            n: n + 1,
            a: state.b.clone(),
            b: &tb * &state.b + h,
            c: &tb * (&state.c + BigInt::one()),
            gamma: rat_int(t as i64) * &state.gamma
                + &four_thirds * &s_rat * Rat::from_integer(h.clone())
                - &s_rat * Rat::from_integer(&state.b - &tb * &state.a),
            psi: rat_int(t as i64) * &state.psi
                + rat_int((t - 1) as i64) * Rat::from_integer(state.b.clone()),
        };
        state = next;
    }
    Ok(out)
}

/// The exact cap (s t^N + 1)/(N (t-1) t^{N-1}) and its simplification 3s/N;
/// the former never exceeds the latter.
pub fn lambda_cap(s: u64, t: u32, n: u32) -> Result<(Rat, Rat)> {
    if t < 2 || n < 1 || s < 1 {
        return Err(Error::invalid("lambda_cap requires s >= 1, t >= 2, N >= 1"));
    }
    let tn = BigInt::from(t).pow(n);
    let tn1 = BigInt::from(t).pow(n - 1);
    let num = BigInt::from(s) * &tn + BigInt::one();
    let den = BigInt::from(n) * BigInt::from(t - 1) * &tn1;
    let exact = Rat::new(num, den);
    let cap = Rat::new(BigInt::from(3 * s), BigInt::from(n));
    if exact > cap {
        return Err(Error::AssertionViolation(format!(
            "(s t^N + 1)/(N (t-1) t^(N-1)) > 3s/N at s = {s}, t = {t}, N = {n}"
        )));
    }
    Ok((exact, cap))
}

/// JSON summary of a replay: the full trace plus the assertion outcomes.
pub fn trace_summary(config: &IterationConfig) -> Result<serde_json::Value> {
    let states = run_iteration(config)?;
    let p = &config.params;
    let final_psi = &states.last().unwrap().psi;
    let psi_floor = rat_int(config.n_max as i64)
        * rat_int((p.t - 1) as i64)
        * Rat::from_integer(BigInt::from(p.t).pow(config.n_max - 1));
    let (theta, delta) = theta_delta(p.t, config.n_max)?;
    let (cap_exact, cap_simple) = lambda_cap(p.s(), p.t, config.n_max)?;
    Ok(json!({
        "k": p.k, "r": p.r, "t": p.t, "s": p.s(), "N": config.n_max,
        "h": config.h_choices.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "trace": states
            .iter()
            .map(|st| json!({
                "n": st.n,
                "a": st.a.to_string(),
                "b": st.b.to_string(),
                "c": st.c.to_string(),
                "gamma": crate::rational::rat_json(&st.gamma),
                "psi": crate::rational::rat_json(&st.psi),
            }))
            .collect::<Vec<_>>(),
        "window_ok": true,
        "psi_final_at_least_floor": *final_psi >= psi_floor,
        "theta": crate::rational::rat_json(&theta),
        "delta": crate::rational::rat_json(&delta),
        "lambda_cap_exact": crate::rational::rat_json(&cap_exact),
        "lambda_cap_simple": crate::rational::rat_json(&cap_simple),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config_zero_h(k: u32, r: u32, t: u32, n: u32) -> IterationConfig {
        IterationConfig {
            params: VinogradovParams::new(k, r, t).unwrap(),
            n_max: n,
            h_choices: vec![BigInt::zero(); n as usize + 1],
        }
    }

    #[test]
    fn zero_h_closed_forms_t2() {
        let cfg = config_zero_h(3, 2, 2, 8);
        let states = run_iteration(&cfg).unwrap();
        for st in &states {
            assert_eq!(st.b, BigInt::from(2u32).pow(st.n));
            let expect_psi = rat_int(st.n as i64)
                * Rat::from_integer(BigInt::from(2u32).pow(st.n.saturating_sub(1)));
            if st.n >= 1 {
                assert_eq!(st.psi, expect_psi);
            }
        }
    }

    #[test]
    fn c_closed_form_matches_recursion() {
        for t in 2..=6u32 {
            for n in 1..=12u32 {
                let cfg = config_zero_h(t, t, t, n);
                let states = run_iteration(&cfg).unwrap();
                for st in &states {
                    let cf = c_closed_form(t, st.n);
                    assert_eq!(st.c, cf, "t={t} n={}", st.n);
                    assert!(cf <= BigInt::from(3u32) * BigInt::from(t).pow(st.n));
                }
            }
        }
    }

    #[test]
    fn gamma_closed_form_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for t in 2..=4u32 {
            let params = VinogradovParams::new(t, t, t).unwrap();
            for _ in 0..20 {
                let cfg = IterationConfig::random(params, 8, &mut rng);
                let states = run_iteration(&cfg).unwrap();
                for w in states.windows(2) {
                    let (prev, cur) = (&w[0], &w[1]);
                    let cf = gamma_closed_form(params.s(), t, cur.n, &cur.b, &prev.b);
                    assert_eq!(cur.gamma, cf, "t={t} n={}", cur.n);
                }
            }
        }
    }

    #[test]
    fn psi_floor_and_b_growth() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in 2..=5u32 {
            let params = VinogradovParams::new(t, t, t).unwrap();
            for _ in 0..10 {
                let cfg = IterationConfig::random(params, 6, &mut rng);
                let states = run_iteration(&cfg).unwrap();
                let last = states.last().unwrap();
                let floor = rat_int(6) * rat_int((t - 1) as i64)
                    * Rat::from_integer(BigInt::from(t).pow(5));
                assert!(last.psi >= floor);
                for st in &states {
                    assert!(st.b >= BigInt::from(t).pow(st.n));
                }
            }
        }
    }

    #[test]
    fn theta_delta_examples() {
        let (theta, delta) = theta_delta(2, 1).unwrap();
        assert_eq!(theta, Rat::new(BigInt::one(), BigInt::from(1024)));
        assert!(delta < theta);
        let (theta, _) = theta_delta(2, 5).unwrap();
        // 4 * 32^5 <= (1/2) * 32^6.
        assert!(rat_int(4 * 32i64.pow(5)) <= Rat::new(BigInt::one(), BigInt::from(2)) / theta);
    }

    #[test]
    fn lambda_cap_examples() {
        let (exact, cap) = lambda_cap(2, 2, 10).unwrap();
        assert_eq!(exact, Rat::new(BigInt::from(2049), BigInt::from(5120)));
        assert_eq!(cap, Rat::new(BigInt::from(6), BigInt::from(10)));
        // Doubling N halves the simple cap.
        let (_, cap2) = lambda_cap(2, 2, 20).unwrap();
        assert_eq!(cap2 * rat_int(2), cap);
        // Strictly decreasing in N.
        let mut prev: Option<Rat> = None;
        for n in 1..=15 {
            let (e, _) = lambda_cap(6, 3, n).unwrap();
            if let Some(p) = prev {
                assert!(e < p);
            }
            prev = Some(e);
        }
    }

    #[test]
    fn h_out_of_range_rejected() {
        let mut cfg = config_zero_h(3, 2, 2, 3);
        cfg.h_choices[1] = BigInt::from(1000);
        assert!(matches!(run_iteration(&cfg), Err(Error::InvalidParams(_))));
        cfg.h_choices[1] = BigInt::zero();
        cfg.h_choices[0] = BigInt::from(4);
        assert!(matches!(run_iteration(&cfg), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn csv_row_shape() {
        let cfg = config_zero_h(3, 2, 2, 2);
        let states = run_iteration(&cfg).unwrap();
        let row = states[1].to_csv_row(Some(&BigInt::zero()));
        assert_eq!(row.split(',').count(), 9);
    }
}
