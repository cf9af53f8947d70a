//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! ring z1 z2
//! bracket z1 z2 : z1*z2
//! dedata
//!   q11 : 1
//!   q12 : 0
//!   alpha 1 2 z1 : z2
//!   nu 2 z1 : 1
//!   w0 : z1
//! end
//! ```
//!
//! An `ore` section (`alpha z1 : ...`, `nu z1 : ...`) may replace the
//! `dedata` section. Entries that are not given are zero.

use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

use poisore::expr::ParseError;
use poisore::poly::{Derivation, Polynomial, Rational, VarTable};
use poisore::{DEDataPoisson, PoissonAlgebra, PoissonOreData};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: undeclared generator `{name}`")]
    Undeclared { line: usize, name: String },
    #[error("line {line}: {source}")]
    Expression { line: usize, source: ParseError },
    #[error("no `ring` line")]
    MissingRing,
}

/// Extension data attached to the base algebra.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Extension {
    None,
    Double(DEDataPoisson),
    Single(PoissonOreData),
}

/// A parsed instance. Jacobi and extension checks have not been run.
#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub algebra: PoissonAlgebra,
    pub extension: Extension,
}

pub fn load_instance(path: &Path) -> Result<InstanceFile, InstanceError> {
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Dedata,
    Ore,
}

struct Parser {
    vars: Option<Arc<VarTable>>,
    brackets: Vec<(usize, usize, Polynomial)>,
    pairs: HashSet<(usize, usize)>,
    dedata: Option<DEDataPoisson>,
    ore: Option<PoissonOreData>,
    seen_keys: HashSet<String>,
}

fn syntax(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Syntax {
        line,
        msg: msg.into(),
    }
}

impl Parser {
    fn vars(&self, line: usize) -> Result<&Arc<VarTable>, InstanceError> {
        self.vars
            .as_ref()
            .ok_or_else(|| syntax(line, "`ring` must come first"))
    }

    fn generator(&self, line: usize, name: &str) -> Result<usize, InstanceError> {
        self.vars(line)?
            .index_of(name)
            .ok_or_else(|| InstanceError::Undeclared {
                line,
                name: name.to_string(),
            })
    }

    fn poly(&self, line: usize, text: &str) -> Result<Polynomial, InstanceError> {
        Polynomial::parse(text, self.vars(line)?).map_err(|source| InstanceError::Expression { line, source })
    }

    fn scalar(&self, line: usize, text: &str) -> Result<Rational, InstanceError> {
        self.poly(line, text)?
            .as_constant()
            .ok_or_else(|| syntax(line, "expected a rational constant"))
    }

    fn once(&mut self, line: usize, key: String) -> Result<(), InstanceError> {
        if !self.seen_keys.insert(key.clone()) {
            return Err(syntax(line, format!("`{key}` given twice")));
        }
        Ok(())
    }

    fn set_image(
        d: &mut Derivation,
        line: usize,
        index: usize,
        value: Polynomial,
    ) -> Result<(), InstanceError> {
        d.set_image(index, value).map_err(|e| syntax(line, e.to_string()))
    }

    fn top(&mut self, line: usize, words: &[&str], rhs: Option<&str>) -> Result<Section, InstanceError> {
        match (words, rhs) {
            (["ring", names @ ..], None) => {
                if self.vars.is_some() {
                    return Err(syntax(line, "second `ring` line"));
                }
                let vars = VarTable::new(names.iter().copied()).map_err(|e| syntax(line, e.to_string()))?;
                self.vars = Some(vars);
            }
            (["bracket", a, b], Some(rhs)) => {
                let (i, j) = (self.generator(line, a)?, self.generator(line, b)?);
                if i == j {
                    return Err(syntax(line, format!("diagonal bracket pair ({a}, {b})")));
                }
                if !self.pairs.insert((i.min(j), i.max(j))) {
                    return Err(syntax(line, format!("duplicate bracket pair ({a}, {b})")));
                }
                let value = self.poly(line, rhs)?;
                self.brackets.push((i, j, value));
            }
            (["dedata"], None) => {
                if self.dedata.is_some() || self.ore.is_some() {
                    return Err(syntax(line, "only one extension section is allowed"));
                }
                self.dedata = Some(DEDataPoisson::zero(self.vars(line)?));
                return Ok(Section::Dedata);
            }
            (["ore"], None) => {
                if self.dedata.is_some() || self.ore.is_some() {
                    return Err(syntax(line, "only one extension section is allowed"));
                }
                self.ore = Some(PoissonOreData::zero(self.vars(line)?));
                return Ok(Section::Ore);
            }
            _ => return Err(syntax(line, format!("unrecognised line `{}`", words.join(" ")))),
        }
        Ok(Section::Top)
    }

    fn index12(line: usize, s: &str) -> Result<usize, InstanceError> {
        match s {
            "1" => Ok(0),
            "2" => Ok(1),
            _ => Err(syntax(line, format!("index `{s}` must be 1 or 2"))),
        }
    }

    fn dedata_line(&mut self, line: usize, words: &[&str], rhs: &str) -> Result<(), InstanceError> {
        self.once(line, words.join(" "))?;
        match words {
            ["q11"] => {
                let c = self.scalar(line, rhs)?;
                self.dedata.as_mut().expect("open section").q11 = c;
            }
            ["q12"] => {
                let c = self.scalar(line, rhs)?;
                self.dedata.as_mut().expect("open section").q12 = c;
            }
            [w @ ("w1" | "w2" | "w0")] => {
                let value = self.poly(line, rhs)?;
                let slot = match *w {
                    "w1" => 0,
                    "w2" => 1,
                    _ => 2,
                };
                self.dedata.as_mut().expect("open section").w[slot] = value;
            }
            ["alpha", k, l, g] => {
                let (k, l) = (Self::index12(line, k)?, Self::index12(line, l)?);
                let j = self.generator(line, g)?;
                let value = self.poly(line, rhs)?;
                let d = &mut self.dedata.as_mut().expect("open section").alpha[k][l];
                Self::set_image(d, line, j, value)?;
            }
            ["nu", k, g] => {
                let k = Self::index12(line, k)?;
                let j = self.generator(line, g)?;
                let value = self.poly(line, rhs)?;
                let d = &mut self.dedata.as_mut().expect("open section").nu[k];
                Self::set_image(d, line, j, value)?;
            }
            _ => {
                return Err(syntax(
                    line,
                    format!("unrecognised dedata entry `{}`", words.join(" ")),
                ))
            }
        }
        Ok(())
    }

    fn ore_line(&mut self, line: usize, words: &[&str], rhs: &str) -> Result<(), InstanceError> {
        self.once(line, format!("ore {}", words.join(" ")))?;
        let (which, g) = match words {
            [which @ ("alpha" | "nu"), g] => (*which, *g),
            _ => {
                return Err(syntax(
                    line,
                    format!("unrecognised ore entry `{}`", words.join(" ")),
                ))
            }
        };
        let j = self.generator(line, g)?;
        let value = self.poly(line, rhs)?;
        let data = self.ore.as_mut().expect("open section");
        let d = if which == "alpha" {
            &mut data.alpha
        } else {
            &mut data.nu
        };
        Self::set_image(d, line, j, value)
    }
}

pub fn parse_instance(text: &str) -> Result<InstanceFile, InstanceError> {
    let mut p = Parser {
        vars: None,
        brackets: Vec::new(),
        pairs: HashSet::new(),
        dedata: None,
        ore: None,
        seen_keys: HashSet::new(),
    };
    let mut section = Section::Top;
    let mut opened = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (head, rhs) = match content.split_once(':') {
            Some((h, r)) => (h, Some(r.trim())),
            None => (content, None),
        };
        let words: Vec<&str> = head.split_whitespace().collect();
        if rhs.is_some_and(str::is_empty) {
            return Err(syntax(line, "missing expression after `:`"));
        }
        section = match section {
            Section::Top => {
                let next = p.top(line, &words, rhs)?;
                if next != Section::Top {
                    opened = line;
                }
                next
            }
            Section::Dedata | Section::Ore if words == ["end"] && rhs.is_none() => Section::Top,
            Section::Dedata => {
                let rhs = rhs.ok_or_else(|| syntax(line, "expected `key : expression`"))?;
                p.dedata_line(line, &words, rhs)?;
                Section::Dedata
            }
            Section::Ore => {
                let rhs = rhs.ok_or_else(|| syntax(line, "expected `key : expression`"))?;
                p.ore_line(line, &words, rhs)?;
                Section::Ore
            }
        };
    }
    if section != Section::Top {
        return Err(syntax(opened, "section is not closed by `end`"));
    }
    let vars = p.vars.ok_or(InstanceError::MissingRing)?;
    let reserved: &[&str] = if p.dedata.is_some() {
        &["x1", "x2", "y1", "y2"]
    } else if p.ore.is_some() {
        &["x", "y"]
    } else {
        &[]
    };
    if let Some(name) = reserved.iter().find(|r| vars.index_of(r).is_some()) {
        return Err(syntax(
            1,
            format!("generator name `{name}` is reserved for the extension"),
        ));
    }
    let algebra = PoissonAlgebra::new(&vars, p.brackets).expect("pairs checked while parsing");
    let extension = match (p.dedata, p.ore) {
        (Some(d), _) => Extension::Double(d),
        (_, Some(s)) => Extension::Single(s),
        _ => Extension::None,
    };
    Ok(InstanceFile { algebra, extension })
}
