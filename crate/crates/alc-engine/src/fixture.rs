//! Golden rows for the classification sweep.
//!
//! Rows are parameterized by the rank `l` and optional integer parameters
//! (`k`, `j`); each row expands into concrete instances for the ranks in scope.
//! Node indices and growth entries are small integer expressions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::rootsys::{DynkinType, Family, IWeight};

pub const EMBEDDED: &str = include_str!("../data/fixtures.toml");

// ---------------------------------------------------------------------------
// Expressions

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(i64),
    Var(String),
    Op(&'static str),
    LParen,
    RParen,
}

const OPS: [&str; 16] = ["&&", "||", "==", "!=", "<=", ">=", "<", ">", "+", "-", "*", "/", "%", "!", "(", ")"];

fn lex(s: &str) -> Result<Vec<Tok>> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    'outer: while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && (b[i] as char).is_ascii_digit() {
                i += 1;
            }
            out.push(Tok::Num(s[st..i].parse().map_err(|_| EngineError::Parse(s.into()))?));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let st = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(Tok::Var(s[st..i].to_string()));
            continue;
        }
        for op in OPS {
            if s[i..].starts_with(op) {
                out.push(match op {
                    "(" => Tok::LParen,
                    ")" => Tok::RParen,
                    _ => Tok::Op(op),
                });
                i += op.len();
                continue 'outer;
            }
        }
        return Err(EngineError::Parse(format!("unexpected '{c}' in expression {s:?}")));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a BTreeMap<String, i64>,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, m: &str) -> EngineError {
        EngineError::Parse(format!("{m} in expression {:?}", self.src))
    }

    fn peek_op(&self) -> Option<&'static str> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(o)) => Some(o),
            _ => None,
        }
    }

    fn binary(&mut self, level: usize) -> Result<i64> {
        const LEVELS: [&[&str]; 5] = [&["||"], &["&&"], &["==", "!=", "<=", ">=", "<", ">"], &["+", "-"], &["*", "/", "%"]];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut acc = self.binary(level + 1)?;
        while let Some(op) = self.peek_op().filter(|o| LEVELS[level].contains(o)) {
            self.pos += 1;
            let rhs = self.binary(level + 1)?;
            acc = match op {
                "||" => ((acc != 0) || (rhs != 0)) as i64,
                "&&" => ((acc != 0) && (rhs != 0)) as i64,
                "==" => (acc == rhs) as i64,
                "!=" => (acc != rhs) as i64,
                "<=" => (acc <= rhs) as i64,
                ">=" => (acc >= rhs) as i64,
                "<" => (acc < rhs) as i64,
                ">" => (acc > rhs) as i64,
                "+" => acc + rhs,
                "-" => acc - rhs,
                "*" => acc * rhs,
                "/" | "%" if rhs == 0 => return Err(self.err("division by zero")),
                "/" => acc.div_euclid(rhs),
                "%" => acc.rem_euclid(rhs),
                _ => unreachable!(),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<i64> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Op("-")) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op("!")) => {
                self.pos += 1;
                Ok((self.unary()? == 0) as i64)
            }
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(n)
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                self.vars.get(&v).copied().ok_or_else(|| self.err(&format!("unbound variable {v}")))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let v = self.binary(0)?;
                if self.toks.get(self.pos) != Some(&Tok::RParen) {
                    return Err(self.err("missing ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("unexpected end")),
        }
    }
}

/// Integer expression over named variables. Booleans are 0/1.
pub fn eval(src: &str, vars: &BTreeMap<String, i64>) -> Result<i64> {
    let mut p = Parser { toks: lex(src)?, pos: 0, vars, src };
    let v = p.binary(0)?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing tokens"));
    }
    Ok(v)
}

pub fn eval_bool(src: &str, vars: &BTreeMap<String, i64>) -> Result<bool> {
    Ok(eval(src, vars)? != 0)
}

// ---------------------------------------------------------------------------
// Rows

fn always() -> String {
    "1".into()
}

fn pass() -> String {
    "pass".into()
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct FixtureSummand {
    /// "sym" (inside S^2 h_alpha) or "mixed" (inside h_alpha h_beta).
    pub kind: String,
    /// Entries "value@node"; unlisted uncrossed nodes carry 0.
    #[serde(default)]
    pub label: Vec<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct FixtureRow {
    pub id: String,
    /// "1", "2", "3", "more", "final", "paths" or "negative".
    pub table: String,
    pub family: String,
    #[serde(default = "always")]
    pub rank: String,
    /// Inclusive integer ranges for auxiliary parameters.
    #[serde(default)]
    pub params: BTreeMap<String, [String; 2]>,
    #[serde(default = "always")]
    pub when: String,
    pub crosses: Vec<String>,
    /// Empty on negative rows means every candidate fails.
    #[serde(default)]
    pub b: Vec<FixtureSummand>,
    #[serde(default)]
    pub growth: Vec<String>,
    /// Growth entries are real dimensions of a complex algebra.
    #[serde(default)]
    pub real_growth: bool,
    #[serde(default = "pass")]
    pub verdict: String,
    /// For failures: "nondegeneracy", "alc" or "any".
    #[serde(default)]
    pub reason: Option<String>,
    /// Known disagreement between this row and the engine.
    #[serde(default)]
    pub deviation: Option<String>,
    #[serde(default)]
    pub deviation_when: Option<String>,
    #[serde(default)]
    pub real_forms: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
struct FixtureFile {
    #[serde(rename = "case")]
    cases: Vec<FixtureRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SumClass {
    Sym,
    Mixed,
}

impl SumClass {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sym" => Ok(SumClass::Sym),
            "mixed" => Ok(SumClass::Mixed),
            _ => Err(EngineError::Parse(format!("summand kind {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureInstance {
    pub row: usize,
    pub id: String,
    pub table: String,
    pub dynkin: DynkinType,
    /// 0-based crossed nodes, sorted.
    pub sigma0: Vec<usize>,
    /// Labels over all nodes; crossed entries are 0.
    pub summands: Vec<(SumClass, IWeight)>,
    pub growth: Vec<usize>,
    pub real_growth: bool,
    pub pass: bool,
    pub reason: Option<String>,
    pub deviation: Option<String>,
    pub vars: BTreeMap<String, i64>,
}

impl FixtureInstance {
    /// Instance name with its parameters, e.g. `B_l^{1,k}[l=4,k=2]`.
    pub fn name(&self) -> String {
        let vs: Vec<String> = self.vars.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("{}[{}]", self.id, vs.join(","))
    }
}

pub fn load_embedded() -> Result<Vec<FixtureRow>> {
    load(EMBEDDED)
}

pub fn load(src: &str) -> Result<Vec<FixtureRow>> {
    let f: FixtureFile = toml::from_str(src).map_err(|e| EngineError::Parse(e.to_string()))?;
    Ok(f.cases)
}

fn family_ranks(f: Family) -> std::ops::RangeInclusive<usize> {
    match f {
        Family::A => 1..=usize::MAX,
        Family::B | Family::C => 2..=usize::MAX,
        Family::D => 4..=usize::MAX,
        Family::E => 6..=8,
        Family::F => 4..=4,
        Family::G => 2..=2,
    }
}

fn parse_label(entry: &str, vars: &BTreeMap<String, i64>, l: usize) -> Result<(usize, i64)> {
    let (v, n) = entry.split_once('@').ok_or_else(|| EngineError::Parse(format!("label entry {entry:?}")))?;
    let value = eval(v, vars)?;
    let node = eval(n, vars)?;
    if node < 1 || node as usize > l {
        return Err(EngineError::InvalidNodes(format!("label node {node} outside 1..={l}")));
    }
    Ok((node as usize - 1, value))
}

/// Every instance of `row` with rank at most `max_rank(family)`.
pub fn instantiate(row_index: usize, row: &FixtureRow, max_rank: &dyn Fn(Family) -> usize) -> Result<Vec<FixtureInstance>> {
    let fam = row
        .family
        .chars()
        .next()
        .and_then(Family::from_letter)
        .ok_or_else(|| EngineError::InvalidType(row.family.clone()))?;
    let r = family_ranks(fam);
    let hi = (*r.end()).min(max_rank(fam));
    let mut out = Vec::new();
    for l in *r.start()..=hi {
        let mut base = BTreeMap::new();
        base.insert("l".to_string(), l as i64);
        if !eval_bool(&row.rank, &base)? {
            continue;
        }
        let mut assignments = vec![base];
        for (name, [lo, up]) in &row.params {
            let mut next = Vec::new();
            for a in &assignments {
                for v in eval(lo, a)?..=eval(up, a)? {
                    let mut b = a.clone();
                    b.insert(name.clone(), v);
                    next.push(b);
                }
            }
            assignments = next;
        }
        for vars in assignments {
            if !eval_bool(&row.when, &vars)? {
                continue;
            }
            out.push(build(row_index, row, fam, l, vars)?);
        }
    }
    Ok(out)
}

fn build(row_index: usize, row: &FixtureRow, fam: Family, l: usize, vars: BTreeMap<String, i64>) -> Result<FixtureInstance> {
    let dynkin = DynkinType::new(fam, l)?;
    let mut sigma0 = Vec::new();
    for c in &row.crosses {
        let n = eval(c, &vars)?;
        if n < 1 || n as usize > l {
            return Err(EngineError::InvalidNodes(format!("{}: cross {n} outside 1..={l}", row.id)));
        }
        sigma0.push(n as usize - 1);
    }
    sigma0.sort_unstable();
    sigma0.dedup();
    let mut summands = Vec::new();
    for s in &row.b {
        let mut w = vec![0i64; l];
        for e in &s.label {
            let (node, v) = parse_label(e, &vars, l)?;
            if sigma0.contains(&node) {
                return Err(EngineError::InvalidNodes(format!("{}: label on crossed node {}", row.id, node + 1)));
            }
            w[node] += v;
        }
        summands.push((SumClass::parse(&s.kind)?, w));
    }
    let growth = row
        .growth
        .iter()
        .map(|g| {
            let v = eval(g, &vars)?;
            usize::try_from(v).map_err(|_| EngineError::Parse(format!("{}: negative growth {v}", row.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    let deviation = match (&row.deviation, &row.deviation_when) {
        (Some(d), Some(w)) if eval_bool(w, &vars)? => Some(d.clone()),
        (Some(d), None) => Some(d.clone()),
        _ => None,
    };
    let pass = match row.verdict.as_str() {
        "pass" => true,
        "fail" => false,
        v => return Err(EngineError::Parse(format!("{}: verdict {v:?}", row.id))),
    };
    Ok(FixtureInstance {
        row: row_index,
        id: row.id.clone(),
        table: row.table.clone(),
        dynkin,
        sigma0,
        summands,
        growth,
        real_growth: row.real_growth,
        pass,
        reason: row.reason.clone(),
        deviation,
        vars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(p: &[(&str, i64)]) -> BTreeMap<String, i64> {
        p.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn expressions() {
        let v = vars(&[("l", 7), ("k", 3)]);
        assert_eq!(eval("2*k*(l-2*k+1)", &v).unwrap(), 12);
        assert_eq!(eval("k*(k-1)/2", &v).unwrap(), 3);
        assert_eq!(eval("-l % 3", &v).unwrap(), 2);
        assert!(eval_bool("l == 2*k+1 && k >= 3", &v).unwrap());
        assert!(!eval_bool("!(l > 6) || k < 2", &v).unwrap());
        assert!(eval("m + 1", &v).is_err());
        assert!(eval("(l", &v).is_err());
        assert!(eval("l 2", &v).is_err());
    }

    #[test]
    fn embedded_rows_parse_and_instantiate() {
        let rows = load_embedded().unwrap();
        assert!(!rows.is_empty());
        for (i, r) in rows.iter().enumerate() {
            instantiate(i, r, &|_| 8).unwrap();
        }
    }
}
