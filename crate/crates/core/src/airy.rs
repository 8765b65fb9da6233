//! Real-argument Airy functions `Ai`, `Bi` and their derivatives.
//!
//! Two evaluation routes are used, switching at `|x| = SERIES_RADIUS`:
//!
//! * `|x| <= SERIES_RADIUS`: the Maclaurin series, summed in double-double
//!   arithmetic. For positive `x` the series for `Ai` cancels catastrophically
//!   (terms grow like `Bi`), and the extra ~16 digits absorb that loss.
//! * `|x| > SERIES_RADIUS`: the large-argument expansions in
//!   `ζ = (2/3)|x|^{3/2}`, exponential for `x > 0` and the modulated
//!   trigonometric form for `x < 0`. Truncating at the smallest term leaves a
//!   relative error of order `e^{-2ζ}`, about `1e-13` at the crossover.
//!
//! `Bi(x)` overflows an `f64` beyond `X_MAX`; [`airy_scaled`] removes the
//! exponential factors and stays finite everywhere.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Crossover between the Maclaurin series and the asymptotic expansions.
pub const SERIES_RADIUS: f64 = 8.0;

/// Largest argument for which the unscaled `Bi(x)` and `Bi'(x)` are finite.
pub const X_MAX: f64 = 104.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValues {
    pub ai: f64,
    pub bi: f64,
    pub ai_prime: f64,
    pub bi_prime: f64,
}

impl AiryValues {
    /// `Ai·Bi' − Ai'·Bi`, which equals `1/π` for unscaled values.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bi_prime - self.ai_prime * self.bi
    }
}

/// `Ai(x)`, `Bi(x)`, `Ai'(x)`, `Bi'(x)`.
///
/// Fails with [`Error::Overflow`] for `x > X_MAX`.
pub fn airy(x: f64) -> Result<AiryValues> {
    if !x.is_finite() {
        return Err(Error::Domain {
            what: "airy",
            reason: format!("non-finite argument {x}"),
        });
    }
    if x > X_MAX {
        return Err(Error::Overflow { function: "Bi", x });
    }
    if x.abs() <= SERIES_RADIUS {
        return Ok(maclaurin(x));
    }
    if x < 0.0 {
        return Ok(oscillatory(-x));
    }
    let s = exponential_scaled(x);
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let decay = (-zeta).exp();
    let growth = zeta.exp();
    Ok(AiryValues {
        ai: s.ai * decay,
        ai_prime: s.ai_prime * decay,
        bi: s.bi * growth,
        bi_prime: s.bi_prime * growth,
    })
}

/// Airy functions with the exponential behaviour removed for `x > 0`.
///
/// For `x > 0` the returned values are `Ai·e^ζ`, `Ai'·e^ζ`, `Bi·e^{−ζ}` and
/// `Bi'·e^{−ζ}` with `ζ = (2/3)x^{3/2}`; multiply by `e^{∓ζ}` to recover the
/// unscaled functions. For `x <= 0` the values are unscaled.
pub fn airy_scaled(x: f64) -> AiryValues {
    if x <= 0.0 {
        return if x >= -SERIES_RADIUS || x.is_nan() {
            maclaurin(x)
        } else {
            oscillatory(-x)
        };
    }
    if x <= SERIES_RADIUS {
        let v = maclaurin(x);
        let zeta = 2.0 / 3.0 * x * x.sqrt();
        let up = zeta.exp();
        let down = (-zeta).exp();
        return AiryValues {
            ai: v.ai * up,
            ai_prime: v.ai_prime * up,
            bi: v.bi * down,
            bi_prime: v.bi_prime * down,
        };
    }
    exponential_scaled(x)
}

// Ai(0), −Ai'(0) and √3 as unevaluated double-double sums.
const AI0: Dd = Dd(0.3550280538878172, 2.05233632436212e-17);
const MINUS_AIP0: Dd = Dd(0.2588194037928068, -2.522243111610832e-17);
const SQRT3: Dd = Dd(1.7320508075688772, 1.0035084221806903e-16);

/// Sum of the Maclaurin series `Ai = c1·f − c2·g`, `Bi = √3(c1·f + c2·g)`.
fn maclaurin(x: f64) -> AiryValues {
    let x3 = Dd::from_prod(x, x).mul_f64(x);
    let xd = Dd(x, 0.0);

    // f = Σ a_k x^{3k}, a_k = a_{k-1} / ((3k-1)(3k))
    // g = Σ b_k x^{3k+1}, b_k = b_{k-1} / ((3k)(3k+1))
    let mut f_term = Dd(1.0, 0.0);
    let mut g_term = xd;
    // f' terms start at k = 1 with x²/2; g' terms start at 1
    let mut fp_term = Dd::from_prod(x, x).div_f64(2.0);
    let mut gp_term = Dd(1.0, 0.0);
    let mut f = f_term;
    let mut g = g_term;
    let mut fp = fp_term;
    let mut gp = gp_term;

    for k in 1..200 {
        let kf = k as f64;
        f_term = f_term.mul(x3).div_f64((3.0 * kf - 1.0) * (3.0 * kf));
        g_term = g_term.mul(x3).div_f64((3.0 * kf) * (3.0 * kf + 1.0));
        gp_term = gp_term.mul(x3).div_f64((3.0 * kf - 2.0) * (3.0 * kf));
        f = f.add(f_term);
        g = g.add(g_term);
        gp = gp.add(gp_term);
        if k >= 2 {
            fp_term = fp_term.mul(x3).div_f64((3.0 * kf - 3.0) * (3.0 * kf - 1.0));
            fp = fp.add(fp_term);
        }
        let small = |t: Dd, s: Dd| t.0.abs() <= 1e-33 * s.0.abs().max(1e-300);
        if k > 2
            && small(f_term, f)
            && small(g_term, g)
            && small(fp_term, fp)
            && small(gp_term, gp)
        {
            break;
        }
    }

    let cf = AI0.mul(f);
    let cg = MINUS_AIP0.mul(g);
    let cfp = AI0.mul(fp);
    let cgp = MINUS_AIP0.mul(gp);
    AiryValues {
        ai: cf.sub(cg).to_f64(),
        bi: SQRT3.mul(cf.add(cg)).to_f64(),
        ai_prime: cfp.sub(cgp).to_f64(),
        bi_prime: SQRT3.mul(cfp.add(cgp)).to_f64(),
    }
}

/// Coefficients `u_k` of the large-argument expansions.
fn u_coefficient(k: usize, prev: f64) -> f64 {
    let k = k as f64;
    prev * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k)
}

/// `(Σ s^k u_k ζ^{-k}, Σ s^k v_k ζ^{-k})` truncated at the smallest term,
/// with `v_k = −(6k+1)/(6k−1)·u_k`.
fn exp_series(zeta: f64, sign: f64) -> (f64, f64) {
    let mut u = 1.0;
    let mut pow = 1.0;
    let mut su = 1.0;
    let mut sv = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        u = u_coefficient(k, u);
        pow *= sign / zeta;
        let tu = u * pow;
        if tu.abs() >= last {
            break;
        }
        let kf = k as f64;
        let tv = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * tu;
        su += tu;
        sv += tv;
        last = tu.abs();
        if last < 1e-18 * su.abs() {
            break;
        }
    }
    (su, sv)
}

fn exponential_scaled(x: f64) -> AiryValues {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let q = x.sqrt().sqrt();
    let norm = 1.0 / PI.sqrt();
    let (au, av) = exp_series(zeta, -1.0);
    let (bu, bv) = exp_series(zeta, 1.0);
    AiryValues {
        ai: 0.5 * norm / q * au,
        ai_prime: -0.5 * norm * q * av,
        bi: norm / q * bu,
        bi_prime: norm * q * bv,
    }
}

/// `Ai(−x)`, `Bi(−x)` and the derivatives with respect to their argument,
/// for large positive `x`.
fn oscillatory(x: f64) -> AiryValues {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    // even / odd parts of the alternating-in-pairs series
    let mut pu = 1.0;
    let mut qu = 0.0;
    let mut pv = 1.0;
    let mut qv = 0.0;
    let mut u = 1.0;
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        u = u_coefficient(k, u);
        pow /= zeta;
        let tu = u * pow;
        if tu.abs() >= last {
            break;
        }
        last = tu.abs();
        let kf = k as f64;
        let tv = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * tu;
        // pairs (2j, 2j+1) carry the sign (−1)^j
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pu += sign * tu;
            pv += sign * tv;
        } else {
            qu += sign * tu;
            qv += sign * tv;
        }
        if last < 1e-18 {
            break;
        }
    }
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    let q = x.sqrt().sqrt();
    let norm = 1.0 / PI.sqrt();
    AiryValues {
        ai: norm / q * (c * pu + s * qu),
        bi: norm / q * (-s * pu + c * qu),
        // derivatives are with respect to the Airy argument (−x)
        ai_prime: norm * q * (s * pv - c * qv),
        bi_prime: norm * q * (c * pv + s * qv),
    }
}

/// Double-double number `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd(s, err)
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd(s, b - (s - a))
    }

    fn from_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd(p, a.mul_add(b, -p))
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.0, o.0);
        let t = Dd::two_sum(self.1, o.1);
        let hi = Dd::quick_two_sum(s.0, s.1 + t.0);
        Dd::quick_two_sum(hi.0, hi.1 + t.1)
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(Dd(-o.0, -o.1))
    }

    fn mul(self, o: Dd) -> Dd {
        let p = Dd::from_prod(self.0, o.0);
        let lo = p.1 + (self.0 * o.1 + self.1 * o.0);
        Dd::quick_two_sum(p.0, lo)
    }

    fn mul_f64(self, b: f64) -> Dd {
        let p = Dd::from_prod(self.0, b);
        Dd::quick_two_sum(p.0, p.1 + self.1 * b)
    }

    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.0 / b;
        let p = Dd::from_prod(q1, b);
        let r = Dd::two_sum(self.0, -p.0);
        let rem = r.0 + (r.1 - p.1 + self.1);
        let q2 = rem / b;
        Dd::quick_two_sum(q1, q2)
    }

    fn to_f64(self) -> f64 {
        self.0 + self.1
    }
}
