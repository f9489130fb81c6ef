//! Line-oriented instance documents.
//!
//! ```text
//! ground: 1 2 3 4
//! set A: 1 2
//! set B: 2 3
//! coat: empty omega A B
//! value empty: 0/1
//! value omega: 1/1
//! value A&B: 1/4        # refinement element by expression
//! value A&!B: 1/4
//! ```
//!
//! `#` starts a comment. Expressions join terms with `&` (intersection); a
//! term is a set name, optionally prefixed by `!` (complement). `empty` and
//! `omega` are reserved. Every refinement member must receive a value, and
//! expressions naming the same set must agree.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::quasi::QuasiMeasure;
use crate::set::{Coat, Formation, GroundSet, SubsetMask};
use crate::testkit::{induce, TrueMeasure};
use crate::value::QValue;

pub const EMPTY: &str = "empty";
pub const OMEGA: &str = "omega";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSet {
    pub name: String,
    pub mask: SubsetMask,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValueSource {
    Induced(TrueMeasure),
    /// `(expression, value)` pairs as written.
    Explicit(Vec<(String, QValue)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSpec {
    pub ground: GroundSet,
    pub sets: Vec<NamedSet>,
    /// Coat member names, in coat order.
    pub coat: Vec<String>,
    pub values: ValueSource,
    /// Generator seed, for generated instances. Not part of the document.
    pub seed: Option<u64>,
}

impl InstanceSpec {
    pub fn lookup(&self, name: &str) -> Result<SubsetMask> {
        match name {
            EMPTY => Ok(self.ground.empty()),
            OMEGA => Ok(self.ground.full()),
            _ => self
                .sets
                .iter()
                .find(|s| s.name == name)
                .map(|s| s.mask)
                .ok_or_else(|| Error::UnknownSet(name.to_string())),
        }
    }

    /// Evaluates an `&`/`!` expression over the named sets.
    pub fn resolve(&self, expr: &str) -> Result<SubsetMask> {
        let mut acc = self.ground.full();
        for term in split_terms(expr).map_err(|(column, message)| Error::Syntax {
            line: 1,
            column,
            message,
        })? {
            let mask = self.lookup(term.name)?;
            acc = acc.meet(if term.negated {
                mask.complement()
            } else {
                mask
            });
        }
        Ok(acc)
    }

    pub fn build_coat(&self) -> Result<Coat> {
        let members = self
            .coat
            .iter()
            .map(|n| self.lookup(n))
            .collect::<Result<Vec<_>>>()?;
        Coat::new(self.ground.clone(), members)
    }

    pub fn quasi_measure(&self) -> Result<QuasiMeasure> {
        let coat = self.build_coat()?;
        match &self.values {
            ValueSource::Induced(tm) => Ok(induce(tm, &coat)),
            ValueSource::Explicit(pairs) => {
                let resolved = pairs
                    .iter()
                    .map(|(expr, v)| Ok((self.resolve(expr)?, v.clone())))
                    .collect::<Result<Vec<_>>>()?;
                QuasiMeasure::new(coat, resolved)
            }
        }
    }

    /// Describes a generated quasi-measure: coat members other than `∅` and
    /// `Ω` are named `S1, S2, …` and values are keyed by canonical
    /// expressions.
    pub fn from_quasi_measure(qm: &QuasiMeasure, seed: Option<u64>) -> Self {
        let g = qm.ground();
        let mut sets = Vec::new();
        let names: Vec<String> = qm
            .coat()
            .members()
            .iter()
            .map(|&m| {
                if m.is_empty() {
                    EMPTY.to_string()
                } else if m.is_full() {
                    OMEGA.to_string()
                } else {
                    let name = format!("S{}", sets.len() + 1);
                    sets.push(NamedSet {
                        name: name.clone(),
                        mask: m,
                    });
                    name
                }
            })
            .collect();
        let spec = Self {
            ground: g.clone(),
            sets,
            coat: names,
            values: ValueSource::Explicit(Vec::new()),
            seed,
        };
        let values = canonical_values(&spec, qm);
        Self {
            values: ValueSource::Explicit(values),
            ..spec
        }
    }

    /// The same instance with explicit values and no seed, which is what a
    /// rendered document parses back to.
    pub fn to_explicit(&self) -> Result<Self> {
        let values = match &self.values {
            ValueSource::Explicit(v) => v.clone(),
            ValueSource::Induced(_) => canonical_values(self, &self.quasi_measure()?),
        };
        Ok(Self {
            values: ValueSource::Explicit(values),
            seed: None,
            ..self.clone()
        })
    }

    pub fn render(&self) -> Result<String> {
        let explicit = self.to_explicit()?;
        let mut out = String::new();
        out.push_str(&format!("ground: {}\n", self.ground.labels().join(" ")));
        for s in &self.sets {
            let labels: Vec<&str> = s
                .mask
                .elements()
                .map(|i| self.ground.labels()[i].as_str())
                .collect();
            out.push_str(&format!("set {}: {}\n", s.name, labels.join(" ")).replace(": \n", ":\n"));
        }
        out.push_str(&format!("coat: {}\n", self.coat.join(" ")));
        if let ValueSource::Explicit(values) = &explicit.values {
            for (expr, v) in values {
                out.push_str(&format!("value {expr}: {v}\n"));
            }
        }
        Ok(out)
    }
}

fn canonical_values(spec: &InstanceSpec, qm: &QuasiMeasure) -> Vec<(String, QValue)> {
    let coat_names = &spec.coat;
    let refinement = qm.refinement();
    refinement
        .members()
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let expr = match qm.coat().position(m) {
                Some(c) => coat_names[c].clone(),
                None => {
                    let p = refinement.provenance(i)[0];
                    let op = match p.kind {
                        Formation::Meet => "&",
                        Formation::Diff => "&!",
                    };
                    format!("{}{}{}", coat_names[p.left], op, coat_names[p.right])
                }
            };
            (expr, qm.value_at(m).clone())
        })
        .collect()
}

struct Term<'a> {
    name: &'a str,
    negated: bool,
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits an expression into terms; errors carry a 1-based column.
fn split_terms(expr: &str) -> std::result::Result<Vec<Term<'_>>, (usize, String)> {
    let mut terms = Vec::new();
    let mut offset = 0;
    for raw in expr.split('&') {
        let lead = raw.len() - raw.trim_start().len();
        let piece = raw.trim();
        let (negated, name) = match piece.strip_prefix('!') {
            Some(rest) => (true, rest.trim_start()),
            None => (false, piece),
        };
        if !is_name(name) {
            return Err((
                offset + lead + 1,
                format!("bad term `{piece}` in expression"),
            ));
        }
        terms.push(Term { name, negated });
        offset += raw.len() + 1;
    }
    Ok(terms)
}

/// Parses and validates an instance document.
pub fn parse_instance(document: &str) -> Result<InstanceSpec> {
    let mut ground: Option<GroundSet> = None;
    let mut sets: Vec<NamedSet> = Vec::new();
    let mut coat: Option<Vec<String>> = None;
    let mut values: Vec<(String, QValue)> = Vec::new();

    for (idx, raw) in document.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let syntax = |column: usize, message: String| Error::Syntax {
            line: line_no,
            column,
            message,
        };
        let indent = line.len() - line.trim_start().len();
        let Some(colon) = line.find(':') else {
            return Err(syntax(line.trim_end().len() + 1, "expected `:`".into()));
        };
        let header = line[..colon].trim();
        let body = &line[colon + 1..];
        let body_col = colon + 2;
        let (keyword, arg) = match header.split_once(char::is_whitespace) {
            Some((k, a)) => (k, Some(a.trim())),
            None => (header, None),
        };
        let arg_col = indent + keyword.len() + 2;
        match (keyword, arg) {
            ("ground", None) => {
                if ground.is_some() {
                    return Err(syntax(indent + 1, "ground declared twice".into()));
                }
                ground = Some(GroundSet::new(body.split_whitespace())?);
            }
            ("set", Some(name)) => {
                let g = ground
                    .as_ref()
                    .ok_or_else(|| syntax(indent + 1, "`set` before `ground`".into()))?;
                if !is_name(name) {
                    return Err(syntax(arg_col, format!("bad set name `{name}`")));
                }
                if name == EMPTY || name == OMEGA {
                    return Err(syntax(arg_col, format!("`{name}` is reserved")));
                }
                if sets.iter().any(|s| s.name == name) {
                    return Err(Error::DuplicateSet(name.to_string()));
                }
                sets.push(NamedSet {
                    name: name.to_string(),
                    mask: g.subset(body.split_whitespace())?,
                });
            }
            ("coat", None) => {
                if coat.is_some() {
                    return Err(syntax(indent + 1, "coat declared twice".into()));
                }
                let names: Vec<String> = body.split_whitespace().map(str::to_string).collect();
                if let Some(bad) = names.iter().find(|n| !is_name(n)) {
                    return Err(syntax(body_col, format!("bad set name `{bad}`")));
                }
                coat = Some(names);
            }
            ("value", Some(expr)) => {
                split_terms(expr).map_err(|(c, m)| syntax(arg_col + c - 1, m))?;
                let text = body.trim();
                if text.is_empty() {
                    return Err(syntax(body_col, "missing value".into()));
                }
                let value: QValue = text.parse().map_err(|e| match e {
                    Error::InvalidRational(s) => {
                        syntax(body_col, format!("invalid rational `{s}`"))
                    }
                    other => other,
                })?;
                values.push((expr.to_string(), value));
            }
            _ => {
                return Err(syntax(indent + 1, format!("unknown header `{header}`")));
            }
        }
    }

    let ground = ground.ok_or_else(|| Error::Syntax {
        line: 1,
        column: 1,
        message: "missing `ground` line".into(),
    })?;
    let coat = coat.ok_or_else(|| Error::Syntax {
        line: 1,
        column: 1,
        message: "missing `coat` line".into(),
    })?;
    let spec = InstanceSpec {
        ground,
        sets,
        coat,
        values: ValueSource::Explicit(values),
        seed: None,
    };
    let mut names = HashSet::new();
    for n in &spec.coat {
        spec.lookup(n)?;
        if !names.insert(n.as_str()) {
            return Err(Error::DuplicateCoatMember(n.clone()));
        }
    }
    spec.quasi_measure()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const UNIFORM: &str = "\
ground: 1 2 3 4
set A: 1 2
set B: 2 3
coat: empty omega A B
value empty: 0/1
value omega: 1/1
value A: 1/2
value B: 1/2
value A&B: 1/4        # refinement element by expression; resolved to a mask
value A&!B: 1/4
value B&!A: 1/4
value omega&!A: 1/2
value omega&!B: 1/2
";

    fn programmatic_uniform() -> QuasiMeasure {
        let g = GroundSet::numbered(4).unwrap();
        let a = g.subset(["1", "2"]).unwrap();
        let b = g.subset(["2", "3"]).unwrap();
        let coat = Coat::new(g.clone(), vec![g.empty(), g.full(), a, b]).unwrap();
        induce(&TrueMeasure::uniform(g), &coat)
    }

    #[test]
    fn parses_the_overlap_instance() {
        let spec = parse_instance(UNIFORM).unwrap();
        let qm = spec.quasi_measure().unwrap();
        let reference = programmatic_uniform();
        assert_eq!(qm.coat(), reference.coat());
        assert!(qm.entries().eq(reference.entries()));
    }

    #[test]
    fn out_of_range_value() {
        let doc = UNIFORM.replace("value A: 1/2", "value A: 5/4");
        let err = parse_instance(&doc).unwrap_err();
        assert_eq!(err, Error::ValueOutOfRange("5/4".into()));
        assert!(err.to_string().starts_with("value outside [0,1]"));
    }

    #[test]
    fn coat_without_omega() {
        let doc = UNIFORM.replace("coat: empty omega A B", "coat: empty A B");
        let err = parse_instance(&doc).unwrap_err();
        assert_eq!(err.to_string(), "coat must contain omega");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_instance("ground: 1 2\nbogus line\n").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 2,
                column: 11,
                message: "expected `:`".into()
            }
        );
        let err = parse_instance("ground: 1 2\nset A: 1\ncoat: empty omega A\nvalue A&&B: 1/2\n")
            .unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 4, .. }), "{err:?}");
        let err = parse_instance("ground: 1 2\nvalue A: 1/x\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Syntax {
                    line: 2,
                    column: 9,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn semantic_errors() {
        let unknown = UNIFORM.replace("set B: 2 3", "set B: 2 9");
        assert_eq!(
            parse_instance(&unknown),
            Err(Error::UnknownLabel("9".into()))
        );
        let dup = UNIFORM.replace("set B: 2 3", "set A: 2 3");
        assert_eq!(parse_instance(&dup), Err(Error::DuplicateSet("A".into())));
        let conflict = format!("{UNIFORM}value A&!empty: 1/3\n");
        assert!(matches!(
            parse_instance(&conflict),
            Err(Error::ConflictingValue(_))
        ));
        let consistent = format!("{UNIFORM}value A&!empty: 1/2\n");
        assert!(parse_instance(&consistent).is_ok());
        let missing = UNIFORM.replace("value omega&!B: 1/2\n", "");
        assert_eq!(
            parse_instance(&missing),
            Err(Error::MissingValue("{1,4}".into()))
        );
        let outside = format!("{UNIFORM}value !A&!B: 1/4\n");
        assert_eq!(
            parse_instance(&outside),
            Err(Error::NotInRefinement("{4}".into()))
        );
        let undefined = UNIFORM.replace("coat: empty omega A B", "coat: empty omega A C");
        assert_eq!(
            parse_instance(&undefined),
            Err(Error::UnknownSet("C".into()))
        );
    }

    #[test]
    fn render_then_parse() {
        let qm = programmatic_uniform();
        let spec = InstanceSpec::from_quasi_measure(&qm, None);
        let text = spec.render().unwrap();
        assert_eq!(parse_instance(&text).unwrap(), spec);
    }

    #[test]
    fn induced_specs_render_explicitly() {
        let g = GroundSet::numbered(2).unwrap();
        let spec = InstanceSpec {
            ground: g.clone(),
            sets: vec![NamedSet {
                name: "A".into(),
                mask: g.subset(["1"]).unwrap(),
            }],
            coat: vec!["empty".into(), "omega".into(), "A".into()],
            values: ValueSource::Induced(TrueMeasure::uniform(g)),
            seed: Some(3),
        };
        let parsed = parse_instance(&spec.render().unwrap()).unwrap();
        assert_eq!(parsed, spec.to_explicit().unwrap());
        assert!(spec
            .quasi_measure()
            .unwrap()
            .entries()
            .eq(parsed.quasi_measure().unwrap().entries()));
    }
}
