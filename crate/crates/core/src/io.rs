//! JSON file formats: surfaces, Weierstrass models, places and line tables.

use serde::{Deserialize, Serialize};

use crate::builtins;
use crate::error::{Error, Result};
use crate::field::{from_hex, to_hex, Field, FieldSpec};
use crate::geometry::{Line, QuarticSurface};
use crate::pencil::{extension, PencilValue};
use crate::poly::SparsePoly;
use crate::tate::WeierstrassModel;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub degree: u32,
    pub modulus: Coeff,
}

impl FieldFile {
    pub fn of(f: &Field) -> Self {
        let s = f.spec();
        FieldFile { degree: s.degree, modulus: Coeff::Hex(to_hex(s.modulus)) }
    }

    pub fn field(&self) -> Result<Field> {
        Ok(Field::new(FieldSpec::new(self.degree, self.modulus.value()?)?))
    }
}

/// A coefficient written as a hex string ("0x6") or a decimal number or string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Number(u32),
    Hex(String),
}

impl Coeff {
    pub fn value(&self) -> Result<u32> {
        match self {
            Coeff::Number(n) => Ok(*n),
            Coeff::Hex(s) => {
                let t = s.trim();
                if t.starts_with("0x") || t.starts_with("0X") {
                    from_hex(t)
                } else {
                    t.parse().map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub exps: Vec<u16>,
    pub coeff: Coeff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceFile {
    pub field: FieldFile,
    pub terms: Vec<TermFile>,
}

impl SurfaceFile {
    pub fn of(s: &QuarticSurface) -> Self {
        let terms = s
            .poly()
            .terms()
            .map(|(m, &c)| TermFile { exps: m.0.clone(), coeff: Coeff::Hex(to_hex(c)) })
            .collect();
        SurfaceFile { field: FieldFile::of(s.field()), terms }
    }

    pub fn surface(&self, label: &str) -> Result<QuarticSurface> {
        let f = self.field.field()?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exps.len() != 4 {
                return Err(Error::Usage(format!("term {:?} needs 4 exponents", t.exps)));
            }
            let c = t.coeff.value()?;
            if !f.contains(c) {
                return Err(Error::Usage(format!("coefficient {} outside GF(2^{})", to_hex(c), f.degree())));
            }
            terms.push((t.exps.clone(), c));
        }
        let p = SparsePoly::from_terms(&f, 4, terms);
        QuarticSurface::new(f, p, label)
    }
}

pub fn parse_surface(text: &str, label: &str) -> Result<QuarticSurface> {
    let file: SurfaceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.surface(label)
}

/// A surface file path or a builtin id.
pub fn load_surface(arg: &str) -> Result<QuarticSurface> {
    let path = std::path::Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)?;
        parse_surface(&text, arg)
    } else {
        builtins::builtin(arg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub field: FieldFile,
    pub chi: u32,
    pub a1: Vec<Coeff>,
    pub a2: Vec<Coeff>,
    pub a3: Vec<Coeff>,
    pub a4: Vec<Coeff>,
    pub a6: Vec<Coeff>,
}

impl ModelFile {
    pub fn of(m: &WeierstrassModel) -> Self {
        let hex = |p: &[u32]| p.iter().map(|&c| Coeff::Hex(to_hex(c))).collect();
        ModelFile {
            field: FieldFile::of(m.field()),
            chi: m.chi,
            a1: hex(&m.a[0]),
            a2: hex(&m.a[1]),
            a3: hex(&m.a[2]),
            a4: hex(&m.a[3]),
            a6: hex(&m.a[4]),
        }
    }

    pub fn model(&self) -> Result<WeierstrassModel> {
        let f = self.field.field()?;
        let list = |v: &[Coeff]| v.iter().map(Coeff::value).collect::<Result<Vec<u32>>>();
        let a = [list(&self.a1)?, list(&self.a2)?, list(&self.a3)?, list(&self.a4)?, list(&self.a6)?];
        WeierstrassModel::new(&f, a, self.chi)
    }
}

pub fn load_model(path: &str) -> Result<WeierstrassModel> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    file.model()
}

/// "inf", or a hex value with an optional absolute field degree: "0x3" or "0x3@4".
pub fn parse_place(field: &Field, s: &str) -> Result<PencilValue> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(PencilValue::Infinity);
    }
    let (v, deg) = match t.split_once('@') {
        Some((v, d)) => (v, d.parse::<u32>().map_err(|_| Error::Parse(format!("bad place degree in {s:?}")))?),
        None => (t, field.degree()),
    };
    if deg % field.degree() != 0 {
        return Err(Error::Usage(format!("GF(2^{deg}) does not contain GF(2^{})", field.degree())));
    }
    let value = from_hex(v)?;
    let kf = extension(field, deg / field.degree())
        .ok_or_else(|| Error::Capability(format!("GF(2^{deg}) exceeds the supported field size")))?;
    if !kf.contains(value) {
        return Err(Error::Usage(format!("{v} is not in GF(2^{deg})")));
    }
    Ok(PencilValue::finite(value, deg))
}

/// A line as its 8 matrix entries (row-major, hex) and Schubert cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineRecord {
    pub id: usize,
    pub entries: Vec<String>,
    pub cell: u8,
}

impl LineRecord {
    pub fn of(id: usize, l: &Line) -> Self {
        let entries = l.rows.iter().flatten().map(|&c| to_hex(c)).collect();
        LineRecord { id, entries, cell: l.cell }
    }

    pub fn line(&self) -> Result<Line> {
        if self.entries.len() != 8 {
            return Err(Error::Parse("a line record has 8 entries".into()));
        }
        let v: Vec<u32> = self.entries.iter().map(|e| from_hex(e)).collect::<Result<_>>()?;
        Ok(Line { cell: self.cell, rows: [[v[0], v[1], v[2], v[3]], [v[4], v[5], v[6], v[7]]] })
    }
}

/// Flat CSV projection of a line table.
pub fn lines_csv(lines: &[LineRecord]) -> String {
    let mut out = String::from("id,cell,e0,e1,e2,e3,e4,e5,e6,e7\n");
    for r in lines {
        out.push_str(&format!("{},{},{}\n", r.id, r.cell, r.entries.join(",")));
    }
    out
}
