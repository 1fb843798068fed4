//! `bracket`: evaluate the brackets of two expressions at one point.

use anyhow::{bail, Result};
use gchs::{geobracket, gspb, gspb_real, pb_complex, Complex, PhasePoint64, StructuredSystem};

use crate::scenario::field;

/// Parses `q1,p1,q2,p2,...` into a point.
pub fn parse_point(text: &str, n: usize) -> Result<PhasePoint64> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow::anyhow!("--at: {s:?}: {e}")))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != 2 * n {
        bail!("--at: expected {} values (q1,p1,...,q{n},p{n}), got {}", 2 * n, values.len());
    }
    let q: Vec<f64> = values.iter().step_by(2).copied().collect();
    let p: Vec<f64> = values.iter().skip(1).step_by(2).copied().collect();
    Ok(PhasePoint64::new(&q, &p)?)
}

pub fn format_complex(v: Complex<f64>) -> String {
    // adding 0.0 turns −0 into +0
    format!("{:.16e},{:.16e}", v.re + 0.0, v.im + 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Brackets {
    pub pb_complex: Complex<f64>,
    pub geobracket: Complex<f64>,
    pub gspb: Complex<f64>,
    pub gspb_real: Complex<f64>,
}

impl Brackets {
    pub fn lines(&self) -> String {
        [
            ("pb_complex", self.pb_complex),
            ("geobracket", self.geobracket),
            ("gspb", self.gspb),
            ("gspb_real", self.gspb_real),
        ]
        .iter()
        .map(|(name, v)| format!("{name} = {}\n", format_complex(*v)))
        .collect()
    }
}

pub fn brackets(f: &str, g: &str, sys: &StructuredSystem, at: &PhasePoint64) -> Result<Brackets> {
    let n = sys.dim();
    let (f, g) = (field("-f", f, n)?, field("-g", g, n)?);
    Ok(Brackets {
        pb_complex: pb_complex(&f, &g, at)?,
        geobracket: geobracket(&f, &g, sys, at)?,
        gspb: gspb(&f, &g, sys, at)?,
        gspb_real: gspb_real(&f, &g, sys, at)?,
    })
}
