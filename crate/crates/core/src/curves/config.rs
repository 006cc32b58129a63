use serde::{Deserialize, Serialize};

use super::{builtin_circle_family_complex, builtin_ellipse_family, CurveFamily, TrigPoly};
use crate::error::{Error, Result};

/// Fourier lists `[c0, a1, b1, a2, b2, ...]` for the family parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierSpec {
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_im: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<f64>>,
}

/// Structured description of a builtin family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Circle { fourier: FourierSpec },
    Ellipse { fourier: FourierSpec },
}

fn poly(list: &Option<Vec<f64>>, name: &str, default: Option<f64>) -> Result<TrigPoly> {
    match (list, default) {
        (Some(l), _) => TrigPoly::from_flat(l),
        (None, Some(d)) => Ok(TrigPoly::constant(d)),
        (None, None) => Err(Error::InvalidInput(format!("missing Fourier list \"{name}\""))),
    }
}

fn reject(present: &[(&Option<Vec<f64>>, &str)], kind: &str) -> Result<()> {
    for (v, name) in present {
        if v.is_some() {
            return Err(Error::InvalidInput(format!("key \"{name}\" is not allowed for a {kind} family")));
        }
    }
    Ok(())
}

impl FamilySpec {
    pub fn build(&self) -> Result<CurveFamily> {
        match self {
            FamilySpec::Circle { fourier: f } => {
                reject(&[(&f.p, "p"), (&f.q, "q"), (&f.phi, "phi")], "circle")?;
                builtin_circle_family_complex(
                    poly(&f.c, "c", Some(0.0))?,
                    poly(&f.c_im, "c_im", Some(0.0))?,
                    poly(&f.radius, "R", None)?,
                )
            }
            FamilySpec::Ellipse { fourier: f } => {
                reject(&[(&f.radius, "R"), (&f.c, "c"), (&f.c_im, "c_im")], "ellipse")?;
                builtin_ellipse_family(poly(&f.p, "p", None)?, poly(&f.q, "q", None)?, poly(&f.phi, "phi", Some(0.0))?)
            }
        }
    }

    pub fn circle(radius: &[f64]) -> Self {
        FamilySpec::Circle { fourier: FourierSpec { radius: Some(radius.to_vec()), ..Default::default() } }
    }

    pub fn ellipse(p: &[f64], q: &[f64], phi: &[f64]) -> Self {
        FamilySpec::Ellipse {
            fourier: FourierSpec {
                p: Some(p.to_vec()),
                q: Some(q.to_vec()),
                phi: Some(phi.to_vec()),
                ..Default::default()
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn parses_both_kinds() {
        let c: FamilySpec = serde_json::from_str(r#"{"type":"circle","fourier":{"R":[1.0,0.1,0.0]}}"#).unwrap();
        let fam = c.build().unwrap();
        assert!((fam.rho(0.0, Complex64::new(1.1, 0.0))).abs() < 1e-15);
        let e: FamilySpec =
            serde_json::from_str(r#"{"type":"ellipse","fourier":{"p":[2.0],"q":[1.0],"phi":[0.0]}}"#).unwrap();
        assert_eq!(e, FamilySpec::ellipse(&[2.0], &[1.0], &[0.0]));
        assert_eq!(e.build().unwrap().rho(0.0, Complex64::new(2.0, 0.0)), 0.0);
    }

    #[test]
    fn rejects_malformed_specs() {
        assert!(serde_json::from_str::<FamilySpec>(r#"{"type":"circle","fourier":{"R":[1.0]},"x":1}"#).is_err());
        assert!(serde_json::from_str::<FamilySpec>(r#"{"type":"circle","fourier":{"S":[1.0]}}"#).is_err());
        assert!(serde_json::from_str::<FamilySpec>(r#"{"type":"square","fourier":{}}"#).is_err());
        let missing: FamilySpec = serde_json::from_str(r#"{"type":"circle","fourier":{}}"#).unwrap();
        assert!(missing.build().is_err());
        let mixed: FamilySpec = serde_json::from_str(r#"{"type":"circle","fourier":{"R":[1.0],"p":[1.0]}}"#).unwrap();
        assert!(mixed.build().is_err());
    }
}
