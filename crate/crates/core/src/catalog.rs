//! Catalog of factorisations of finite simple groups, with group orders as
//! integer expressions.
//!
//! Order expressions use `+ - * / ^`, parentheses, the variables of the row
//! (`q`, `a`) and the functions below. A part may list alternatives separated
//! by `|`; each alternative is one possible isomorphism type.
//!
//! | function | order |
//! |---|---|
//! | `sp(n,q)` | symplectic group `Sp_n(q)` |
//! | `omega_odd(n,q)` | `Ω_n(q)`, `n` odd |
//! | `pomega_plus(n,q)` | `PΩ⁺_n(q)`, `n` even |
//! | `o_minus(n,q)`, `o_plus(n,q)` | full orthogonal groups `O^±_n(q)` |
//! | `psl(n,q)` | `PSL_n(q)` |
//! | `g2(q)` | `G_2(q)` |
//! | `alt(n)`, `sym(n)` | `A_n`, `S_n` |
//! | `gcd(a,b)` | |

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CATALOG_JSON: &str = include_str!("../data/catalog.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Descriptor {
    pub name: String,
    pub order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maximal: Option<bool>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamRule {
    pub min: u64,
    #[serde(default)]
    pub power_of_two: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogRow {
    pub key: String,
    pub table: u8,
    pub row: u8,
    pub t: Descriptor,
    pub parts: Vec<Descriptor>,
    #[serde(default)]
    pub params: BTreeMap<String, ParamRule>,
    #[serde(default)]
    pub samples: Vec<BTreeMap<String, u64>>,
    pub atlas_instantiable: bool,
    #[serde(default)]
    pub disputed: bool,
    #[serde(default)]
    pub notes: String,
}

/// A row evaluated at concrete parameters. Each part carries its
/// alternatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowOrders {
    pub t: u128,
    pub parts: Vec<Vec<u128>>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Catalog {
    pub rows: Vec<CatalogRow>,
}

impl Catalog {
    pub fn builtin() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| Catalog::parse(CATALOG_JSON).expect("shipped catalog parses"))
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        let c: Catalog = serde_json::from_str(text)?;
        for r in &c.rows {
            if r.parts.len() < 2 {
                return Err(Error::DataCorruption {
                    entry: r.key.clone(),
                    reason: "a factorisation needs at least two parts".into(),
                });
            }
            if r.atlas_instantiable && !r.params.is_empty() {
                return Err(Error::DataCorruption {
                    entry: r.key.clone(),
                    reason: "atlas rows take no parameters".into(),
                });
            }
        }
        Ok(c)
    }

    pub fn row(&self, key: &str) -> Option<&CatalogRow> {
        self.rows.iter().find(|r| r.key == key)
    }

    pub fn table(&self, table: u8) -> impl Iterator<Item = &CatalogRow> {
        self.rows.iter().filter(move |r| r.table == table)
    }

    /// Rows of `tables` realised at atlas scale whose orders match `t_order`
    /// and, up to reordering, `part_orders`. Disputed rows never match.
    pub fn match_orders(&self, tables: &[u8], t_order: u128, part_orders: &[u128]) -> Vec<&CatalogRow> {
        self.rows
            .iter()
            .filter(|r| tables.contains(&r.table) && r.atlas_instantiable && !r.disputed)
            .filter(|r| match r.instantiate(&BTreeMap::new()) {
                Ok(o) => o.t == t_order && parts_match(&o.parts, part_orders),
                Err(_) => false,
            })
            .collect()
    }

    /// Rows where `part_orders` can be assigned to distinct parts, which
    /// may leave some parts unused.
    pub fn match_some_orders(&self, tables: &[u8], t_order: u128, part_orders: &[u128]) -> Vec<&CatalogRow> {
        self.rows
            .iter()
            .filter(|r| tables.contains(&r.table) && r.atlas_instantiable && !r.disputed)
            .filter(|r| match r.instantiate(&BTreeMap::new()) {
                Ok(o) => o.t == t_order && parts_embed(&o.parts, part_orders),
                Err(_) => false,
            })
            .collect()
    }
}

fn parts_embed(alts: &[Vec<u128>], orders: &[u128]) -> bool {
    fn go(i: usize, alts: &[Vec<u128>], orders: &[u128], used: &mut [bool]) -> bool {
        if i == orders.len() {
            return true;
        }
        for j in 0..alts.len() {
            if !used[j] && alts[j].contains(&orders[i]) {
                used[j] = true;
                if go(i + 1, alts, orders, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    orders.len() <= alts.len() && go(0, alts, orders, &mut vec![false; alts.len()])
}

fn parts_match(alts: &[Vec<u128>], orders: &[u128]) -> bool {
    if alts.len() != orders.len() {
        return false;
    }
    let mut used = vec![false; orders.len()];
    fn go(i: usize, alts: &[Vec<u128>], orders: &[u128], used: &mut [bool]) -> bool {
        if i == alts.len() {
            return true;
        }
        for j in 0..orders.len() {
            if !used[j] && alts[i].contains(&orders[j]) {
                used[j] = true;
                if go(i + 1, alts, orders, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(0, alts, orders, &mut used)
}

impl CatalogRow {
    pub fn check_params(&self, vars: &BTreeMap<String, u64>) -> Result<()> {
        for (name, rule) in &self.params {
            let v = *vars
                .get(name)
                .ok_or_else(|| Error::input(format!("row {} needs parameter {name}", self.key)))?;
            if v < rule.min || (rule.power_of_two && !v.is_power_of_two()) {
                return Err(Error::input(format!("parameter {name}={v} is outside the range of row {}", self.key)));
            }
        }
        Ok(())
    }

    pub fn instantiate(&self, vars: &BTreeMap<String, u64>) -> Result<RowOrders> {
        self.check_params(vars)?;
        let t = evaluate(&self.t.order, vars)?;
        if t.len() != 1 {
            return Err(Error::DataCorruption {
                entry: self.key.clone(),
                reason: "the simple group has one order".into(),
            });
        }
        let parts = self
            .parts
            .iter()
            .map(|p| evaluate(&p.order, vars))
            .collect::<Result<Vec<_>>>()?;
        Ok(RowOrders { t: t[0], parts })
    }

    /// Every alternative of every part divides `|T|` and is proper.
    pub fn orders_consistent(&self, vars: &BTreeMap<String, u64>) -> Result<bool> {
        let o = self.instantiate(vars)?;
        Ok(o
            .parts
            .iter()
            .flatten()
            .all(|&x| x > 1 && x < o.t && o.t % x == 0))
    }
}

/// Evaluates an order expression; one value per `|`-separated alternative.
pub fn evaluate(expr: &str, vars: &BTreeMap<String, u64>) -> Result<Vec<u128>> {
    expr.split('|')
        .map(|alt| {
            let tokens = tokenize(alt)?;
            let mut p = Parser { tokens, pos: 0, vars };
            let v = p.expr()?;
            if p.pos != p.tokens.len() {
                return Err(Error::input(format!("trailing input in expression {alt:?}")));
            }
            Ok(v)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u128),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let mut v: u128 = 0;
            while i < cs.len() && cs[i].is_ascii_digit() {
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(cs[i] as u128 - '0' as u128))
                    .ok_or_else(|| Error::input("numeral overflows"))?;
                i += 1;
            }
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::input(format!("unexpected character {c:?} in expression")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    vars: &'a BTreeMap<String, u64>,
}

fn overflow() -> Error {
    Error::input("order expression overflows 128 bits")
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::input(format!("expected {c:?} in expression")))
        }
    }

    fn expr(&mut self) -> Result<u128> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v = v.checked_add(self.term()?).ok_or_else(overflow)?;
            } else if self.eat('-') {
                v = v
                    .checked_sub(self.term()?)
                    .ok_or_else(|| Error::input("negative intermediate value"))?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<u128> {
        let mut v = self.power()?;
        loop {
            if self.eat('*') {
                v = v.checked_mul(self.power()?).ok_or_else(overflow)?;
            } else if self.eat('/') {
                let d = self.power()?;
                if d == 0 || v % d != 0 {
                    return Err(Error::input(format!("inexact division {v}/{d}")));
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn power(&mut self) -> Result<u128> {
        let b = self.atom()?;
        if self.eat('^') {
            let e = self.power()?;
            let e = u32::try_from(e).map_err(|_| overflow())?;
            return b.checked_pow(e).ok_or_else(overflow);
        }
        Ok(b)
    }

    fn atom(&mut self) -> Result<u128> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat('(') {
                    let mut args = vec![self.expr()?];
                    while self.eat(',') {
                        args.push(self.expr()?);
                    }
                    self.expect(')')?;
                    call(&name, &args)
                } else {
                    self.vars
                        .get(&name)
                        .map(|&v| v as u128)
                        .ok_or_else(|| Error::input(format!("unbound variable {name}")))
                }
            }
            _ => Err(Error::input("malformed expression")),
        }
    }
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

struct Acc(u128);

impl Acc {
    fn mul(&mut self, x: u128) -> Result<()> {
        self.0 = self.0.checked_mul(x).ok_or_else(overflow)?;
        Ok(())
    }
}

fn pow(q: u128, e: u128) -> Result<u128> {
    q.checked_pow(u32::try_from(e).map_err(|_| overflow())?).ok_or_else(overflow)
}

/// `Π_{i=1}^{m} (q^{2i} − 1)`.
fn symplectic_product(q: u128, m: u128) -> Result<Acc> {
    let mut acc = Acc(1);
    for i in 1..=m {
        acc.mul(pow(q, 2 * i)? - 1)?;
    }
    Ok(acc)
}

fn call(name: &str, args: &[u128]) -> Result<u128> {
    let arity = |k: usize| -> Result<()> {
        if args.len() == k {
            Ok(())
        } else {
            Err(Error::input(format!("{name} takes {k} arguments")))
        }
    };
    let even_dim = |n: u128| -> Result<u128> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::input(format!("{name} needs an even dimension")));
        }
        Ok(n / 2)
    };
    match name {
        "gcd" => {
            arity(2)?;
            Ok(gcd(args[0], args[1]))
        }
        "alt" | "sym" => {
            arity(1)?;
            let mut acc = Acc(1);
            for i in 2..=args[0] {
                acc.mul(i)?;
            }
            Ok(if name == "alt" && args[0] >= 2 { acc.0 / 2 } else { acc.0 })
        }
        "sp" => {
            arity(2)?;
            let (m, q) = (even_dim(args[0])?, args[1]);
            let mut acc = symplectic_product(q, m)?;
            acc.mul(pow(q, m * m)?)?;
            Ok(acc.0)
        }
        "omega_odd" => {
            arity(2)?;
            let (n, q) = (args[0], args[1]);
            if n % 2 == 0 {
                return Err(Error::input("omega_odd needs an odd dimension"));
            }
            let m = n / 2;
            let mut acc = symplectic_product(q, m)?;
            acc.mul(pow(q, m * m)?)?;
            Ok(acc.0 / gcd(2, q - 1))
        }
        "pomega_plus" | "o_plus" | "o_minus" => {
            arity(2)?;
            let (m, q) = (even_dim(args[0])?, args[1]);
            let mut acc = symplectic_product(q, m - 1)?;
            acc.mul(pow(q, m * (m - 1))?)?;
            let qm = pow(q, m)?;
            match name {
                "pomega_plus" => {
                    acc.mul(qm - 1)?;
                    Ok(acc.0 / gcd(4, qm - 1))
                }
                "o_plus" => {
                    acc.mul(2 * (qm - 1))?;
                    Ok(acc.0)
                }
                _ => {
                    acc.mul(2 * (qm + 1))?;
                    Ok(acc.0)
                }
            }
        }
        "psl" => {
            arity(2)?;
            let (n, q) = (args[0], args[1]);
            let mut acc = Acc(pow(q, n * (n - 1) / 2)?);
            for i in 2..=n {
                acc.mul(pow(q, i)? - 1)?;
            }
            Ok(acc.0 / gcd(n, q - 1))
        }
        "g2" => {
            arity(1)?;
            let q = args[0];
            let mut acc = Acc(pow(q, 6)?);
            acc.mul(pow(q, 6)? - 1)?;
            acc.mul(q * q - 1)?;
            Ok(acc.0)
        }
        _ => Err(Error::input(format!("unknown function {name}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str) -> u128 {
        evaluate(s, &BTreeMap::new()).unwrap()[0]
    }

    #[test]
    fn known_orders() {
        assert_eq!(ev("alt(6)"), 360);
        assert_eq!(ev("psl(2,11)"), 660);
        assert_eq!(ev("sp(6,2)"), 1_451_520);
        assert_eq!(ev("g2(2)"), 12_096);
        assert_eq!(ev("o_minus(6,2)"), 51_840);
        assert_eq!(ev("o_plus(6,2)"), 40_320);
        assert_eq!(ev("omega_odd(7,2)"), 1_451_520);
        assert_eq!(ev("pomega_plus(8,2)"), 174_182_400);
        assert_eq!(ev("psl(4,3)"), 6_065_280);
        assert_eq!(ev("64*alt(8)"), 1_290_240);
        assert_eq!(ev("2^3^2"), 512);
    }

    #[test]
    fn bad_expressions() {
        let v = BTreeMap::new();
        assert!(evaluate("alt(6) )", &v).is_err());
        assert!(evaluate("q", &v).is_err());
        assert!(evaluate("7/2", &v).is_err());
        assert!(evaluate("frob(2)", &v).is_err());
    }

    #[test]
    fn catalog_matches_atlas_orders() {
        let c = Catalog::builtin();
        let hits = c.match_orders(&[1, 3], 360, &[60, 60]);
        let keys: Vec<&str> = hits.iter().map(|r| r.key.as_str()).collect();
        assert_eq!(keys, ["T1R1", "T3R1"]);
        let hits = c.match_orders(&[1], 95040, &[660, 7920]);
        assert_eq!(hits[0].key, "T1R2b");
        let hits = c.match_orders(&[2], 1_451_520, &[40320, 12096, 51840]);
        assert_eq!(hits[0].key, "T2R3a");
        assert!(c.match_orders(&[1, 2, 3, 4], 360, &[60, 24]).is_empty());
    }
}
