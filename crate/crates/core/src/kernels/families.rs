use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::bessel::ln_bessel_k;
use super::KernelError;

/// `x^a` with exact shortcuts for the exponents used by the named models.
#[inline]
pub(crate) fn pow(x: f64, a: f64) -> f64 {
    if a == 1.0 {
        x
    } else if a == 2.0 {
        x * x
    } else if a == 0.5 {
        x.sqrt()
    } else if a == 0.25 {
        x.sqrt().sqrt()
    } else {
        x.powf(a)
    }
}

fn positive(name: &'static str, v: f64) -> Result<(), KernelError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(KernelError::InvalidParams(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Spatial correlation `φ`, normalized so that `φ(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialFamily {
    /// `1 - (r^b / (1 + r^b))^τ`
    Dagum { b: f64, tau: f64 },
    /// `(1 + r^b)^(-δ)`
    GenCauchy {
        #[serde(rename = "b_S")]
        b_s: f64,
        #[serde(rename = "delta_S")]
        delta_s: f64,
    },
    /// `(1 - e^{-2√(r+a)}) / √(r+a)`, divided by its value at zero.
    Schilling { a: f64 },
    /// `2^{1-ν} / Γ(ν) · r^ν K_ν(r)`
    Matern { nu: f64 },
    /// `exp(-r^a)`
    PowExp { a: f64 },
    /// `(1 - r)_+^ν`
    Askey { nu: f64 },
}

impl SpatialFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SpatialFamily::Dagum { .. } => "dagum",
            SpatialFamily::GenCauchy { .. } => "gen_cauchy",
            SpatialFamily::Schilling { .. } => "schilling",
            SpatialFamily::Matern { .. } => "matern",
            SpatialFamily::PowExp { .. } => "pow_exp",
            SpatialFamily::Askey { .. } => "askey",
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            SpatialFamily::Dagum { b, tau } => {
                positive("dagum b", b)?;
                positive("dagum tau", tau)
            }
            SpatialFamily::GenCauchy { b_s, delta_s } => {
                positive("gen_cauchy b_S", b_s)?;
                positive("gen_cauchy delta_S", delta_s)
            }
            SpatialFamily::Schilling { a } => positive("schilling a", a),
            SpatialFamily::Matern { nu } => positive("matern nu", nu),
            SpatialFamily::PowExp { a } => positive("pow_exp a", a),
            SpatialFamily::Askey { nu } => positive("askey nu", nu),
        }
    }

    /// `φ(r)` for `r ≥ 0`, without parameter checks.
    pub fn value(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 1.0;
        }
        match *self {
            SpatialFamily::Dagum { b, tau } => {
                // 1 - (1 + r^{-b})^{-τ}, written to avoid cancellation at large r.
                -(-tau * pow(r, -b).ln_1p()).exp_m1()
            }
            SpatialFamily::GenCauchy { b_s, delta_s } if b_s == 1.0 && delta_s == 2.0 => {
                let v = 1.0 / (1.0 + r);
                v * v
            }
            SpatialFamily::GenCauchy { b_s, delta_s } => {
                let s = pow(r, b_s).ln_1p();
                if delta_s == 2.0 {
                    let v = (-s).exp();
                    v * v
                } else {
                    (-delta_s * s).exp()
                }
            }
            SpatialFamily::Schilling { a } => {
                let f = |x: f64| {
                    let s = (x + a).sqrt();
                    -(-2.0 * s).exp_m1() / s
                };
                f(r) / f(0.0)
            }
            SpatialFamily::Matern { nu } => matern(nu, r),
            SpatialFamily::PowExp { a } => (-pow(r, a)).exp(),
            SpatialFamily::Askey { nu } => {
                if r >= 1.0 {
                    0.0
                } else {
                    pow(1.0 - r, nu)
                }
            }
        }
    }

    /// Complete monotonicity on `[0, ∞)` for the catalog parameter ranges.
    pub fn is_completely_monotone(&self) -> bool {
        match *self {
            SpatialFamily::Dagum { b, tau } => b <= 1.0 && tau <= 1.0,
            SpatialFamily::GenCauchy { b_s, .. } => b_s <= 1.0,
            SpatialFamily::Schilling { .. } => true,
            SpatialFamily::Matern { nu } => nu <= 0.5,
            SpatialFamily::PowExp { a } => a <= 1.0,
            SpatialFamily::Askey { .. } => false,
        }
    }

    /// Membership in the Stieltjes whitelist.
    pub fn is_stieltjes(&self) -> bool {
        match *self {
            SpatialFamily::Dagum { b, tau } => b <= 1.0 && tau <= 1.0,
            SpatialFamily::GenCauchy { b_s, .. } => b_s <= 1.0,
            SpatialFamily::Schilling { .. } => true,
            _ => false,
        }
    }
}

fn matern(nu: f64, r: f64) -> f64 {
    let ln = (1.0 - nu) * std::f64::consts::LN_2 - ln_gamma(nu) + nu * r.ln() + ln_bessel_k(nu, r);
    ln.exp().min(1.0)
}

/// Temporal function `ψ`, positive and nondecreasing on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TemporalFamily {
    /// `1 + (t^b / (1 + t^b))^τ`
    #[serde(rename = "dagum")]
    DagumPsi { b: f64, tau: f64 },
    /// `(1 + t^a)^{b/a}`
    #[serde(rename = "gen_cauchy")]
    GenCauchyPsi { a: f64, b: f64 },
    /// `c + t^a`
    #[serde(rename = "power")]
    PowerPsi { a: f64, c: f64 },
    /// `1 + t^{a_T}`
    #[serde(rename = "gneiting")]
    GneitingPsi {
        #[serde(rename = "a_T")]
        a_t: f64,
    },
}

impl TemporalFamily {
    pub fn name(&self) -> &'static str {
        match self {
            TemporalFamily::DagumPsi { .. } => "dagum",
            TemporalFamily::GenCauchyPsi { .. } => "gen_cauchy",
            TemporalFamily::PowerPsi { .. } => "power",
            TemporalFamily::GneitingPsi { .. } => "gneiting",
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            TemporalFamily::DagumPsi { b, tau } => {
                positive("dagum b", b)?;
                positive("dagum tau", tau)
            }
            TemporalFamily::GenCauchyPsi { a, b } => {
                positive("gen_cauchy a", a)?;
                positive("gen_cauchy b", b)
            }
            TemporalFamily::PowerPsi { a, c } => {
                positive("power a", a)?;
                positive("power c", c)
            }
            TemporalFamily::GneitingPsi { a_t } => positive("gneiting a_T", a_t),
        }
    }

    /// `ψ(t)` for `t ≥ 0`, without parameter checks.
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TemporalFamily::DagumPsi { b, tau } => {
                if t == 0.0 {
                    1.0
                } else {
                    1.0 + (-tau * pow(t, -b).ln_1p()).exp()
                }
            }
            TemporalFamily::GenCauchyPsi { a, b } => ((b / a) * pow(t, a).ln_1p()).exp(),
            TemporalFamily::PowerPsi { a, c } => c + pow(t, a),
            TemporalFamily::GneitingPsi { a_t } => 1.0 + pow(t, a_t),
        }
    }

    /// Bernstein property, with the catalog parameter ranges read literally.
    pub fn is_bernstein(&self) -> bool {
        match *self {
            TemporalFamily::DagumPsi { b, tau } => b <= 1.0 && tau <= 1.0,
            TemporalFamily::GenCauchyPsi { a, b } => a <= 1.0 && b <= a,
            TemporalFamily::PowerPsi { a, .. } => a <= 1.0,
            TemporalFamily::GneitingPsi { a_t } => a_t <= 1.0,
        }
    }
}

pub fn eval_phi(family: &SpatialFamily, r: f64) -> Result<f64, KernelError> {
    family.validate()?;
    if !(r >= 0.0) {
        return Err(KernelError::InvalidArgument(format!("distance must be nonnegative, got {r}")));
    }
    Ok(family.value(r))
}

pub fn eval_psi(family: &TemporalFamily, t: f64) -> Result<f64, KernelError> {
    family.validate()?;
    if !(t >= 0.0) {
        return Err(KernelError::InvalidArgument(format!("time lag must be nonnegative, got {t}")));
    }
    Ok(family.value(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn all_families_are_one_at_zero() {
        let fams = [
            SpatialFamily::Dagum { b: 0.5, tau: 0.7 },
            SpatialFamily::GenCauchy { b_s: 1.0, delta_s: 2.0 },
            SpatialFamily::Schilling { a: 1.0 },
            SpatialFamily::Matern { nu: 1.3 },
            SpatialFamily::PowExp { a: 0.5 },
            SpatialFamily::Askey { nu: 3.0 },
        ];
        for f in fams {
            assert_eq!(eval_phi(&f, 0.0).unwrap(), 1.0, "{f:?}");
            assert!(f.value(1e-300) <= 1.0);
        }
    }

    #[test]
    fn gen_cauchy_reference() {
        let f = SpatialFamily::GenCauchy { b_s: 1.0, delta_s: 1.0 };
        assert!(rel(eval_phi(&f, 1.0).unwrap(), 0.5) < 1e-15);
    }

    #[test]
    fn dagum_schilling_reference() {
        let d = SpatialFamily::Dagum { b: 0.5, tau: 0.7 };
        assert!(rel(d.value(2.0), 0.3122707137141192933) < 1e-14);
        let s = SpatialFamily::Schilling { a: 1.0 };
        assert!(rel(s.value(2.0), 0.64681552535787529239) < 1e-14);
    }

    #[test]
    fn askey_support() {
        let f = SpatialFamily::Askey { nu: 2.0 };
        assert_eq!(f.value(1.5), 0.0);
        assert_eq!(f.value(1.0), 0.0);
        assert_eq!(SpatialFamily::Askey { nu: 5.0 }.value(0.5), 1.0 / 32.0);
    }

    #[test]
    fn matern_reference_values() {
        let cases: [(f64, f64, f64); 20] = [
            (0.3, 1e-6, 0.99976030723212909424),
            (0.3, 0.01, 0.93982645546963798972),
            (0.3, 0.5, 0.4306988530399081089),
            (0.3, 3.0, 0.026574909900391645801),
            (0.3, 20.0, 7.6752133048867040787e-10),
            (0.3, 45.0, 9.0828895878610200061e-21),
            (1.2, 1e-6, 0.99999999999875398504),
            (1.2, 0.01, 0.99989086296660311588),
            (1.2, 0.5, 0.87024519561496658634),
            (1.2, 3.0, 0.1515880037744187875),
            (1.2, 20.0, 2.0529213752777418566e-8),
            (1.2, 45.0, 4.9500336703622370191e-19),
            (2.7, 0.5, 0.96464809826906037621),
            (2.7, 3.0, 0.37502419211897052776),
            (2.7, 20.0, 4.4500221842184333673e-7),
            (2.7, 45.0, 3.3487100619146324998e-17),
            (5.25, 0.5, 0.98543422694265556063),
            (5.25, 3.0, 0.60950010656095792056),
            (5.25, 20.0, 0.000011324854142017158465),
            (5.25, 45.0, 5.1490771440991761452e-15),
        ];
        for (nu, r, want) in cases {
            let got = SpatialFamily::Matern { nu }.value(r);
            assert!(rel(got, want) < 1e-12, "nu={nu} r={r} got={got} want={want}");
        }
    }

    #[test]
    fn psi_reference_values() {
        assert_eq!(eval_psi(&TemporalFamily::GneitingPsi { a_t: 1.0 }, 1.0).unwrap(), 2.0);
        assert_eq!(eval_psi(&TemporalFamily::PowerPsi { a: 1.0, c: 0.5 }, 0.0).unwrap(), 0.5);
        let d = TemporalFamily::DagumPsi { b: 0.5, tau: 1.0 };
        assert!(rel(eval_psi(&d, 1.0).unwrap(), 1.5) < 1e-15);
        let g = TemporalFamily::GenCauchyPsi { a: 0.5, b: 0.5 };
        assert!(rel(g.value(4.0), 3.0) < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters_and_arguments() {
        assert!(eval_phi(&SpatialFamily::Matern { nu: 0.0 }, 1.0).is_err());
        assert!(eval_phi(&SpatialFamily::Dagum { b: 1.0, tau: f64::NAN }, 1.0).is_err());
        assert!(eval_phi(&SpatialFamily::PowExp { a: 1.0 }, -1.0).is_err());
        assert!(eval_psi(&TemporalFamily::PowerPsi { a: 1.0, c: 0.0 }, 1.0).is_err());
    }

    #[test]
    fn serde_shape() {
        let f: SpatialFamily =
            serde_json::from_str(r#"{"family":"gen_cauchy","b_S":1,"delta_S":2}"#).unwrap();
        assert_eq!(f, SpatialFamily::GenCauchy { b_s: 1.0, delta_s: 2.0 });
        let p: TemporalFamily = serde_json::from_str(r#"{"family":"gneiting","a_T":1}"#).unwrap();
        assert_eq!(p, TemporalFamily::GneitingPsi { a_t: 1.0 });
        assert!(serde_json::from_str::<TemporalFamily>(r#"{"family":"gneiting","a_T":1,"x":2}"#)
            .is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn spatial() -> impl Strategy<Value = SpatialFamily> {
            prop_oneof![
                (0.1f64..2.0, 0.1f64..2.0).prop_map(|(b, tau)| SpatialFamily::Dagum { b, tau }),
                (0.1f64..2.0, 0.1f64..3.0)
                    .prop_map(|(b_s, delta_s)| SpatialFamily::GenCauchy { b_s, delta_s }),
                (0.1f64..3.0).prop_map(|a| SpatialFamily::Schilling { a }),
                (0.1f64..4.0).prop_map(|nu| SpatialFamily::Matern { nu }),
                (0.1f64..2.0).prop_map(|a| SpatialFamily::PowExp { a }),
                (0.5f64..8.0).prop_map(|nu| SpatialFamily::Askey { nu }),
            ]
        }

        proptest! {
            #[test]
            fn phi_in_unit_interval_and_nonincreasing(f in spatial(), r in 0.0f64..40.0, dr in 0.0f64..5.0) {
                let a = f.value(r);
                let b = f.value(r + dr);
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert!(b <= a * (1.0 + 1e-12) + 1e-300);
            }
        }
    }
}
