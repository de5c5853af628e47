//! Closed-form spectra of the Hodge and Yano Laplacians on 1-forms over flat
//! tori and round spheres.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Sphere,
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    Killing,
    ConformalGradient,
    Harmonic,
    FourierMode(u32),
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTag::Killing => write!(f, "killing"),
            FamilyTag::ConformalGradient => write!(f, "conformal-gradient"),
            FamilyTag::Harmonic => write!(f, "harmonic"),
            FamilyTag::FourierMode(k) => write!(f, "fourier-mode:{k}"),
        }
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "killing" => Ok(FamilyTag::Killing),
            "conformal-gradient" => Ok(FamilyTag::ConformalGradient),
            "harmonic" => Ok(FamilyTag::Harmonic),
            _ => match s.strip_prefix("fourier-mode:").map(str::parse) {
                Some(Ok(k)) => Ok(FamilyTag::FourierMode(k)),
                _ => Err(Error::UnknownFamily(s.to_string())),
            },
        }
    }
}

/// One eigenspace of a model manifold, described on both sides of the
/// Weitzenböck formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticEigenFamily {
    pub model: Model,
    pub dimension: u32,
    pub family: FamilyTag,
    pub lambda_hodge: f64,
    pub lambda_sym: f64,
    pub multiplicity: u32,
    /// `⟨δω, δω⟩ / ⟨ω, ω⟩`
    pub divergence_ratio: f64,
}

/// Eigenvalues `4π²|k|²` of the Laplacian on 1-forms over the unit flat torus
/// `Tⁿ`, with multiplicity `n · #{k : |k|² = const}`. Only shells with
/// `|k|² ≤ k_max²` are returned so every multiplicity is complete.
pub fn torus_oracle(n: usize, k_max: i64) -> Result<Vec<(f64, usize)>> {
    if !(2..=3).contains(&n) {
        return Err(Error::OutOfRange(format!("torus oracle supports n = 2, 3; got {n}")));
    }
    if k_max < 1 {
        return Err(Error::OutOfRange(format!("k_max must be >= 1, got {k_max}")));
    }
    let mut shells: BTreeMap<i64, usize> = BTreeMap::new();
    let range = -k_max..=k_max;
    let mut visit = |k2: i64| {
        if k2 <= k_max * k_max {
            *shells.entry(k2).or_default() += n;
        }
    };
    for a in range.clone() {
        for b in range.clone() {
            if n == 2 {
                visit(a * a + b * b);
            } else {
                for c in range.clone() {
                    visit(a * a + b * b + c * c);
                }
            }
        }
    }
    Ok(shells
        .into_iter()
        .map(|(k2, mult)| (4.0 * PI * PI * k2 as f64, mult))
        .collect())
}

/// `λ(Δ_sym)` for a Killing or conformal-gradient family on the unit `Sⁿ`.
/// Both the Weitzenböck route and the conformal sign formula are evaluated,
/// and they must agree bit for bit.
pub fn sphere_oracle(n: u32, family: FamilyTag) -> Result<AnalyticEigenFamily> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("sphere dimension must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let ricci = nf - 1.0;
    let (lambda_hodge, multiplicity, divergence_ratio) = match family {
        FamilyTag::Killing => (2.0 * ricci, n * (n + 1) / 2, 0.0),
        FamilyTag::ConformalGradient => (nf, n + 1, nf),
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    let weitzenbock = lambda_hodge - 2.0 * ricci;
    let formula = conformal_lambda(nf, divergence_ratio);
    if weitzenbock != formula {
        return Err(Error::Assembly(format!(
            "sphere oracle routes disagree for {family} on S^{n}: {weitzenbock} vs {formula}"
        )));
    }
    Ok(AnalyticEigenFamily {
        model: Model::Sphere,
        dimension: n,
        family,
        lambda_hodge,
        lambda_sym: weitzenbock,
        multiplicity,
        divergence_ratio,
    })
}

/// Eigenvalue forced on a conformal Killing eigenform with divergence ratio
/// `ratio`: `−(1 − 2/n)·ratio`, never positive.
pub fn conformal_lambda(n: f64, ratio: f64) -> f64 {
    let v = -(1.0 - 2.0 / n) * ratio;
    // normalize the signed zero at n = 2
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Eigenvalue forced on a projective Killing eigenform: `2/(n+1)·ratio ≥ 0`.
pub fn projective_lambda(n: f64, ratio: f64) -> f64 {
    2.0 / (n + 1.0) * ratio
}

/// The projective Killing family available in closed form is the Killing
/// family itself (`δω = 0`), whose eigenvalue is 0.
pub fn projective_sign_oracle(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("dimension must be >= 2, got {n}")));
    }
    Ok(projective_lambda(n as f64, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_torus_low_shells() {
        let s = torus_oracle(2, 3).unwrap();
        assert_eq!(s[0], (0.0, 2));
        assert_eq!(s[1].1, 8);
        assert!((s[1].0 - 4.0 * PI * PI).abs() < 1e-12);
        assert_eq!(s[2].1, 8);
        assert!((s[2].0 - 8.0 * PI * PI).abs() < 1e-12);
        let t3 = torus_oracle(3, 2).unwrap();
        assert_eq!(t3[0], (0.0, 3));
        assert_eq!(t3[1].1, 18);
    }

    #[test]
    fn sphere_families() {
        let k = sphere_oracle(2, FamilyTag::Killing).unwrap();
        assert_eq!((k.lambda_sym, k.multiplicity), (0.0, 3));
        let c = sphere_oracle(3, FamilyTag::ConformalGradient).unwrap();
        assert_eq!(c.lambda_sym, -1.0);
        assert_eq!(sphere_oracle(2, FamilyTag::ConformalGradient).unwrap().lambda_sym, 0.0);
        assert!(sphere_oracle(2, FamilyTag::Harmonic).is_err());
        assert!("bogus".parse::<FamilyTag>().is_err());
    }

    #[test]
    fn projective_sign() {
        assert_eq!(projective_sign_oracle(2).unwrap(), 0.0);
        assert!(projective_lambda(3.0, 0.7) >= 0.0);
    }
}
