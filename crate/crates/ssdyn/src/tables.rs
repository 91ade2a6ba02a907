//! Butcher tables of the single-solve family and the algorithm registry.
//!
//! A table is the 11-tuple (p, α1..α10) driving one step:
//!
//! ```text
//! u_{n+p} = u_n + pΔt v_n + Δt²(α1 a_n + α2 a_{n+p})
//! v_{n+p} = v_n + Δt(α3 a_n + α4 a_{n+p})
//! M a_{n+p} = f(u_{n+p}, v_{n+p}, t_n + pΔt)
//! u_{n+1} = u_n + Δt v_n + Δt²(α5 a_n + α6 a_{n+p})
//! v_{n+1} = v_n + Δt(α7 a_n + α8 a_{n+p})
//! a_{n+1} = α9 a_n + α10 a_{n+p}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// α2 = α4 = 0: the effective mass is M.
    FullyExplicit,
    /// α2 = 0, α4 ≠ 0: damping enters the effective mass.
    VelocityImplicit,
    /// α2 ≠ 0: stiffness enters the effective mass.
    Implicit,
}

/// Accuracy orders as (displacement, velocity, acceleration); `None` marks a
/// variable the scheme does not update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orders {
    pub disp: u8,
    pub vel: u8,
    pub acc: Option<u8>,
}

const fn ord(disp: u8, vel: u8, acc: u8) -> Orders {
    Orders {
        disp,
        vel,
        acc: Some(acc),
    }
}

/// Claimed global orders for forced problems, undamped and damped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimedOrders {
    pub undamped: Orders,
    pub damped: Orders,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ButcherTable {
    pub name: String,
    pub p: f64,
    /// α1..α10 stored zero-based.
    pub alpha: [f64; 10],
    pub rho_b: Option<f64>,
    pub rho_s: Option<f64>,
    /// False when the published scheme has no acceleration update; the
    /// stepping engine then carries a_{n+1} = a_{n+p} internally.
    pub acceleration_available: bool,
    pub claimed: ClaimedOrders,
}

impl ButcherTable {
    pub fn new(name: impl Into<String>, p: f64, alpha: [f64; 10], claimed: ClaimedOrders) -> Self {
        Self {
            name: name.into(),
            p,
            alpha,
            rho_b: None,
            rho_s: None,
            acceleration_available: true,
            claimed,
        }
    }

    /// One-based accessor, `a(1)` is α1.
    #[inline]
    pub fn a(&self, i: usize) -> f64 {
        self.alpha[i - 1]
    }

    pub fn classification(&self) -> Classification {
        match (self.a(2) == 0.0, self.a(4) == 0.0) {
            (true, true) => Classification::FullyExplicit,
            (true, false) => Classification::VelocityImplicit,
            (false, _) => Classification::Implicit,
        }
    }

    pub fn is_fully_explicit(&self) -> bool {
        self.classification() == Classification::FullyExplicit
    }

    pub fn is_velocity_implicit(&self) -> bool {
        self.classification() == Classification::VelocityImplicit
    }

    pub fn is_finite(&self) -> bool {
        self.p.is_finite() && self.alpha.iter().all(|x| x.is_finite())
    }

    /// Residuals of the identical second-order conditions:
    /// α3+α4−p, α5+α6−½, α7+α8−1, α9+α10−1, α8−1/(2p), α10−1/p.
    pub fn identical_second_order_residuals(&self) -> [f64; 6] {
        let p = self.p;
        [
            self.a(3) + self.a(4) - p,
            self.a(5) + self.a(6) - 0.5,
            self.a(7) + self.a(8) - 1.0,
            self.a(9) + self.a(10) - 1.0,
            self.a(8) - 0.5 / p,
            self.a(10) - 1.0 / p,
        ]
    }

    /// Residuals of the (weaker) second-order displacement/velocity
    /// conditions. The damped condition is included when `damped` is set.
    pub fn displacement_velocity_residuals(&self, damped: bool) -> Vec<f64> {
        let p = self.p;
        let [a1, _a2, a3, a4, a5, a6, a7, a8, a9, a10] = self.alpha;
        let _ = a1;
        let mut r = vec![
            1.0 - a7 * a10 + a8 * a9 - a8 - a9,
            (p * a9 - p - 1.0) * a8 + (a6 - 1.0) * a9 - (p * a7 + a5) * a10 - a6 + 2.0,
            (2.0 * p - 1.0) * a9 - 2.0 * p - 2.0 * a8 + 3.0,
        ];
        if damped {
            r.push(
                (2.0 * a7 * a4 + 2.0 * a3 + a7) * a10
                    + (2.0 * (1.0 - a9) * a4 - a9 + 3.0) * a8
                    + 2.0 * a9
                    - 4.0,
            );
        }
        r
    }

    /// Largest residual among the order conditions implied by the claimed
    /// orders; `None` for first-order schemes, which are exempt.
    pub fn order_condition_defect(&self) -> Option<f64> {
        let c = self.claimed;
        let max_abs = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let all_two = |o: Orders| o.disp >= 2 && o.vel >= 2 && o.acc.is_some_and(|a| a >= 2);
        if all_two(c.undamped) && all_two(c.damped) {
            Some(max_abs(&self.identical_second_order_residuals()))
        } else if c.undamped.disp >= 2 && c.undamped.vel >= 2 {
            let damped = c.damped.disp >= 2 && c.damped.vel >= 2;
            Some(max_abs(&self.displacement_velocity_residuals(damped)))
        } else {
            None
        }
    }

    pub fn with_params(mut self, rho_b: Option<f64>, rho_s: Option<f64>) -> Self {
        self.rho_b = rho_b;
        self.rho_s = rho_s;
        self
    }

    /// Registry-style label, e.g. `GSSE(0.8,0)`.
    pub fn label(&self) -> String {
        match (self.rho_b, self.rho_s) {
            (Some(b), Some(s)) => format!("{}({b},{s})", self.name),
            (Some(b), None) => format!("{}({b})", self.name),
            _ => self.name.clone(),
        }
    }
}

/// p shared by both new third-order algorithms.
pub fn third_order_p() -> f64 {
    (3.0 + 3.0_f64.sqrt()) / 6.0
}

/// The third-order single-solve algorithms: `1` is fully explicit, `2`
/// treats velocity implicitly.
///
/// # Panics
/// If `which` is not 1 or 2.
pub fn new_algorithm(which: u8) -> ButcherTable {
    let p = third_order_p();
    let (a3, a4, name, damped) = match which {
        1 => (p, 0.0, "NEW1", ord(2, 2, 2)),
        2 => (
            (12.0 * p * p - 6.0 * p + 1.0) / (12.0 * p),
            (6.0 * p - 1.0) / (12.0 * p),
            "NEW2",
            ord(3, 3, 2),
        ),
        _ => panic!("new_algorithm: `which` must be 1 or 2, got {which}"),
    };
    let alpha = [
        p * p / 2.0,
        0.0,
        a3,
        a4,
        (6.0 * p * p - 1.0) / (12.0 * p),
        (-6.0 * p * p + 6.0 * p + 1.0) / (12.0 * p),
        (2.0 * p - 1.0) / (2.0 * p),
        1.0 / (2.0 * p),
        (p - 1.0) / p,
        1.0 / p,
    ];
    ButcherTable::new(
        name,
        p,
        alpha,
        ClaimedOrders {
            undamped: ord(3, 3, 2),
            damped,
        },
    )
}

/// Canonical names accepted by [`table`].
pub const REGISTRY: &[&str] = &[
    "TW", "EN-BETA", "EDV1", "TSSE", "EHHT", "CL", "NT", "EWBZ", "EG", "ICL", "NE", "GSSE", "GSSI",
    "NEW1", "NEW2",
];

fn canonical(name: &str) -> Option<&'static str> {
    let n = name.trim().to_ascii_uppercase().replace('_', "-");
    let n = n
        .trim_end_matches("-ALPHA")
        .trim_end_matches("-Α")
        .to_string();
    Some(match n.as_str() {
        "TW" => "TW",
        "EN-BETA" | "ENBETA" | "EN-B" | "EN" => "EN-BETA",
        "EDV1" => "EDV1",
        "TSSE" => "TSSE",
        "EHHT" => "EHHT",
        "CL" => "CL",
        "NT" => "NT",
        "EWBZ" => "EWBZ",
        "EG" => "EG",
        "ICL" => "ICL",
        "NE" | "CD" => "NE",
        "GSSE" => "GSSE",
        "GSSI" => "GSSI",
        "NEW1" | "ALG1" | "ALGORITHM1" | "A1" => "NEW1",
        "NEW2" | "ALG2" | "ALGORITHM2" | "A2" => "NEW2",
        "E-GSSSS" | "EGSSSS" => "E-GSSSS",
        _ => return None,
    })
}

fn check_range(name: &str, param: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::ParameterRange {
            name: name.to_string(),
            param,
            value,
            lo,
            hi,
        })
    }
}

fn check_rho_s(name: &str, rb: f64, rs: f64) -> Result<()> {
    check_range(name, "rho_s", rs, -rb, rb)
}

fn finish(t: ButcherTable) -> Result<ButcherTable> {
    if t.is_finite() {
        Ok(t)
    } else {
        Err(Error::Construction(
            t.label(),
            "non-finite coefficient at these parameters".into(),
        ))
    }
}

/// Fully numeric table by registry name.
///
/// Unspecified dissipation parameters default to the zero-dissipation
/// member (ρb = 1) and ρs = 0.
pub fn table(name: &str, rho_b: Option<f64>, rho_s: Option<f64>) -> Result<ButcherTable> {
    let key = canonical(name).ok_or_else(|| Error::UnknownTable(name.to_string()))?;
    let rb = rho_b.unwrap_or(1.0);
    let rs = rho_s.unwrap_or(0.0);
    let one = ord(1, 1, 1);
    let two_one = ord(2, 2, 1);
    let two = ord(2, 2, 2);
    let t = match key {
        "NEW1" => return Ok(new_algorithm(1)),
        "NEW2" => return Ok(new_algorithm(2)),
        "NE" => ButcherTable::new(
            "NE",
            1.0,
            [0.5, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 1.0],
            ClaimedOrders {
                undamped: two,
                damped: two,
            },
        ),
        "NT" => ButcherTable::new(
            "NT",
            0.5,
            [0.0, 0.0, 0.0, 0.5, 0.0, 0.5, 0.0, 1.0, 0.0, 1.0],
            ClaimedOrders {
                undamped: two_one,
                damped: two_one,
            },
        ),
        "TW" => {
            check_range(key, "rho_b", rb, 0.0, 1.0)?;
            let g = 2.0 / (rb + 1.0);
            ButcherTable::new(
                "TW",
                1.0,
                [g, 0.0, 1.0, 0.0, g, 0.0, 1.0, 0.0, 0.0, 1.0],
                ClaimedOrders {
                    undamped: one,
                    damped: one,
                },
            )
            .with_params(Some(rb), None)
        }
        "EN-BETA" => {
            check_range(key, "rho_b", rb, 0.0, 1.0)?;
            let g = (3.0 * rb - 1.0) / (2.0 * (rb + 1.0));
            let h = (3.0 - rb) / (2.0 * (rb + 1.0));
            // β is free in the family; β = 0.
            ButcherTable::new(
                "EN-BETA",
                0.0,
                [0.0, 0.0, g, 0.0, 0.5, 0.0, g, h, 0.0, 1.0],
                ClaimedOrders {
                    undamped: one,
                    damped: one,
                },
            )
            .with_params(Some(rb), None)
        }
        "EDV1" | "TSSE" => {
            check_range(key, "rho_b", rb, 0.0, 1.0)?;
            let g = (3.0 - rb) / (2.0 * (rb + 1.0));
            let claimed = if key == "EDV1" {
                let o = Orders {
                    disp: 1,
                    vel: 1,
                    acc: None,
                };
                ClaimedOrders {
                    undamped: o,
                    damped: o,
                }
            } else {
                ClaimedOrders {
                    undamped: one,
                    damped: one,
                }
            };
            let mut t = ButcherTable::new(
                key,
                1.0,
                [g, 0.0, 0.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 1.0],
                claimed,
            )
            .with_params(Some(rb), None);
            t.acceleration_available = key != "EDV1";
            t
        }
        "EHHT" => {
            check_range(key, "rho_b", rb, 0.5, 1.0)?;
            let q = rb + 1.0;
            ButcherTable::new(
                "EHHT",
                2.0 * rb / q,
                [
                    (rb * rb + 2.0 * rb - 1.0) * rb / q.powi(3),
                    0.0,
                    rb * (3.0 * rb - 1.0) / (q * q),
                    0.0,
                    (rb * rb + 2.0 * rb - 1.0) / (2.0 * q * q),
                    1.0 / (q * q),
                    (3.0 * rb - 1.0) / (2.0 * q),
                    (3.0 - rb) / (2.0 * q),
                    0.0,
                    1.0,
                ],
                ClaimedOrders {
                    undamped: two_one,
                    damped: one,
                },
            )
            .with_params(Some(rb), None)
        }
        "CL" => {
            check_range(key, "rho_b", rb, 0.5, 1.0)?;
            let q = (rb + 1.0).powi(3);
            ButcherTable::new(
                "CL",
                0.0,
                [
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                    (rb.powi(3) - 5.0 * rb * rb - 3.0 * rb - 1.0) / (2.0 * q),
                    (4.0 * rb * rb + 3.0 * rb + 1.0) / q,
                    -0.5,
                    1.5,
                    0.0,
                    1.0,
                ],
                ClaimedOrders {
                    undamped: two_one,
                    damped: two_one,
                },
            )
            .with_params(Some(rb), None)
        }
        "ICL" => {
            check_range(key, "rho_b", rb, 0.5, 1.0)?;
            let q = (rb + 1.0).powi(3);
            ButcherTable::new(
                "ICL",
                1.0,
                [
                    0.5,
                    0.0,
                    1.0,
                    0.0,
                    (3.0 * rb + 1.0) * (rb * rb + 1.0) / (2.0 * q),
                    rb * rb * (1.0 - rb) / q,
                    0.5,
                    0.5,
                    0.0,
                    1.0,
                ],
                ClaimedOrders {
                    undamped: two,
                    damped: two,
                },
            )
            .with_params(Some(rb), None)
        }
        "EWBZ" | "EG" => {
            check_range(key, "rho_b", rb, 0.0, 1.0)?;
            check_rho_s(key, rb, rs)?;
            let am = (2.0 * rb * rs + rb - 1.0) / ((rs + 1.0) * (rb + 1.0));
            let (p, a1, a7, a8, beta) = if key == "EWBZ" {
                let beta =
                    ((rb - 1.0) * rs * rs + 2.0 * (rb * rb + rb - 2.0) * rs - 3.0 * rb - 5.0)
                        / ((rb * rs - rs - 2.0) * (rs + 1.0) * (rb + 1.0).powi(2));
                (
                    0.0,
                    0.0,
                    1.0 / (2.0 * (am - 1.0)),
                    (2.0 * am - 3.0) / (2.0 * (am - 1.0)),
                    beta,
                )
            } else {
                let beta = ((rb - 1.0).powi(3) * rs * rs
                    + (rb * rb - rb.powi(3) + 13.0 * rb - 5.0) * rs
                    + 2.0 * rb * rb
                    - 10.0)
                    / (2.0 * (rb + 1.0) * (3.0 * rb * rs + rb - rs - 3.0) * (rb * rs - rs - 2.0));
                let p = 1.5 - am;
                (p, (0.5 - beta) * p, 1.0, 0.0, beta)
            };
            let a3 = p;
            ButcherTable::new(
                key,
                p,
                [
                    a1,
                    0.0,
                    a3,
                    0.0,
                    (2.0 * beta + am - 1.0) / (2.0 * (am - 1.0)),
                    beta / (1.0 - am),
                    a7,
                    a8,
                    am / (am - 1.0),
                    1.0 / (1.0 - am),
                ],
                ClaimedOrders {
                    undamped: two_one,
                    damped: two_one,
                },
            )
            .with_params(Some(rb), Some(rs))
        }
        "GSSE" | "GSSI" => {
            check_range(key, "rho_b", rb, 0.0, 1.0)?;
            check_rho_s(key, rb, rs)?;
            let (p, beta) = gss_p_beta(rb, rs);
            let (a3, a4) = if key == "GSSE" {
                (p, 0.0)
            } else {
                (p / 2.0, p / 2.0)
            };
            ButcherTable::new(
                key,
                p,
                [
                    p * p / 2.0,
                    0.0,
                    a3,
                    a4,
                    0.5 - beta,
                    beta,
                    1.0 - 0.5 / p,
                    0.5 / p,
                    1.0 - 1.0 / p,
                    1.0 / p,
                ],
                ClaimedOrders {
                    undamped: two,
                    damped: two,
                },
            )
            .with_params(Some(rb), Some(rs))
        }
        "E-GSSSS" => {
            return Err(Error::Construction(
                "E-GSSSS".into(),
                "published relations leave W1, λ3, η3 undetermined".into(),
            ))
        }
        _ => unreachable!(),
    };
    finish(t)
}

/// p and β of the GSSE/GSSI family.
pub fn gss_p_beta(rb: f64, rs: f64) -> (f64, f64) {
    let p = -(rb * rs - rs - 2.0) / ((rs + 1.0) * (rb + 1.0));
    let num = 2.0 * (1.0 - rb) * rb * rs.powi(3)
        + (1.0 - rb) * (rb * rb + 6.0 * rb - 1.0) * rs * rs
        - 2.0 * (1.0 - 5.0 * rb) * rs
        - 2.0 * (1.0 - rb);
    let den = 2.0 * (rs + 1.0) * (rb + 1.0) * (rb * rs - rs - 2.0).powi(2);
    (p, num / den)
}

/// Parses `name[:rho_b[:rho_s]]`, e.g. `gsse:0.8` or `ewbz:0.5:0.2`.
pub fn parse_spec(spec: &str) -> Result<ButcherTable> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let mut num =
        |what: &str| -> Result<Option<f64>> {
            match parts.next() {
                None | Some("") => Ok(None),
                Some(s) => s.trim().parse::<f64>().map(Some).map_err(|_| {
                    Error::InvalidArgument(format!("{what} in `{spec}` is not a number"))
                }),
            }
        };
    let rb = num("rho_b")?;
    let rs = num("rho_s")?;
    table(name, rb, rs)
}

/// Every registered scheme at its default parameters.
pub fn all_default() -> Vec<ButcherTable> {
    REGISTRY
        .iter()
        .map(|n| table(n, None, None).expect("registry default"))
        .collect()
}
