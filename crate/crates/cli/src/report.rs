//! Report documents and value formatting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use padic_core::{Character, Padic, Ring, Trunc};
use robba::W;

/// Largest numerator and denominator shown as a plain fraction.
const SMALL: i64 = 100_000;

/// a/b with a ≡ u·b mod m and |a|, |b| <= SMALL, if one exists.
fn reconstruct(u: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = BigInt::from(SMALL);
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::from(1));
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound || !r1.gcd(&s1).abs().eq(&BigInt::from(1)) {
        return None;
    }
    Some(BigRational::new(r1, s1))
}

/// A p-adic value as a short fraction when it is one, else `m*p^v!N` with
/// `digits` digits of the unit.
pub fn padic(x: &Padic, digits: i64) -> String {
    let (m, v, n) = x.parts();
    let p = x.p();
    if m.is_zero() {
        return if x.is_exact() { "0".into() } else { format!("O(p^{n})") };
    }
    let pv = |e: i64| BigRational::from_integer(BigInt::from(p).pow(e.unsigned_abs() as u32));
    let scale = |r: BigRational| if v >= 0 { r * pv(v) } else { r / pv(v) };
    if x.is_exact() {
        let r = scale(BigRational::from_integer(m.clone()));
        if r.numer().abs() <= BigInt::from(SMALL) && r.denom() <= &BigInt::from(SMALL) {
            return r.to_string();
        }
    } else {
        let rel = (n - v).min(60);
        if rel >= 8 {
            let modulus = BigInt::from(p).pow(rel as u32);
            if let Some(r) = reconstruct(&m, &modulus) {
                let r = scale(r);
                if r.numer().abs() <= BigInt::from(SMALL) && r.denom() <= &BigInt::from(SMALL) {
                    return r.to_string();
                }
            }
        }
    }
    let keep = digits.min(x.rel_prec());
    let modulus = BigInt::from(p).pow(keep as u32);
    let mut u = m.mod_floor(&modulus);
    if u > &modulus / 2 {
        u -= &modulus;
    }
    format!("{u}*p^{v}!{}", v + keep)
}

pub fn base(x: &Trunc<Padic>, digits: i64) -> String {
    if x.order() == 1 {
        padic(x.coeff(0), digits)
    } else {
        let parts: Vec<String> = x.coeffs().iter().map(|c| padic(c, digits)).collect();
        format!("[{}]", parts.join(", "))
    }
}

pub fn character(c: &Character<Padic>, digits: i64) -> String {
    let mut s = format!("({}, {})", base(&c.p_value, digits), c.weight);
    if let Some(nu) = &c.nu {
        if !nu.vanishes() {
            s = format!("({}, {}, nu {})", base(&c.p_value, digits), c.weight, base(nu, digits));
        }
    }
    s
}

pub fn bound(w: &Option<W>) -> String {
    match w {
        None => "inf".into(),
        Some(x) => x.to_string(),
    }
}

pub fn big_bound(w: &Option<BigRational>) -> String {
    match w {
        None => "inf".into(),
        Some(x) => x.to_string(),
    }
}

pub fn list<T: ToString>(v: &[T]) -> String {
    format!("[{}]", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
}

pub fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or("-".into(), |x| x.to_string())
}

/// Valuation floor of a base element as text.
pub fn val(x: &Trunc<Padic>) -> String {
    if x.vanishes() {
        "inf".into()
    } else {
        x.val_floor().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// Completed with certificates.
    Certified,
    /// Completed; the answer is a negative or structural verdict.
    Answered,
    /// Completed but the certificates do not settle the question.
    Inconclusive,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Certified => "certified",
            Status::Answered => "answered",
            Status::Inconclusive => "inconclusive",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryReport {
    pub name: String,
    pub kind: String,
    pub status: Status,
    pub fields: Vec<(String, String)>,
    pub table: Option<Table>,
}

impl QueryReport {
    pub fn new(name: &str, kind: &str) -> Self {
        QueryReport { name: name.into(), kind: kind.into(), status: Status::Certified, fields: Vec::new(), table: None }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn fail(&mut self, msg: impl ToString) {
        self.status = Status::Error;
        self.set("error", msg.to_string().replace('\n', " "));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportDocument {
    pub header: Vec<(String, String)>,
    pub queries: Vec<QueryReport>,
    pub tables: bool,
}

impl ReportDocument {
    pub fn query(&self, name: &str) -> Option<&QueryReport> {
        self.queries.iter().find(|q| q.name == name)
    }

    pub fn errors(&self) -> usize {
        self.queries.iter().filter(|q| q.status == Status::Error).count()
    }

    /// 0 when every query completed, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.errors() == 0 {
            0
        } else {
            3
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::from("report {\n");
        for (k, v) in &self.header {
            s.push_str(&format!("    {k} = {v}\n"));
        }
        s.push_str("}\n");
        for q in &self.queries {
            s.push_str(&format!("query {} {} {{\n", q.name, q.kind));
            s.push_str(&format!("    status = {}\n", q.status.as_str()));
            for (k, v) in &q.fields {
                s.push_str(&format!("    {k} = {v}\n"));
            }
            if let Some(t) = &q.table {
                for row in &t.rows {
                    s.push_str(&format!("    row {{\n"));
                    for (c, x) in t.columns.iter().zip(row) {
                        s.push_str(&format!("        {c} = {x}\n"));
                    }
                    s.push_str("    }\n");
                }
            }
            s.push_str("}\n");
        }
        if self.tables {
            for q in &self.queries {
                if let Some(t) = &q.table {
                    s.push_str(&format!("\n# table {}\n", q.name));
                    s.push_str(&t.columns.join("\t"));
                    s.push('\n');
                    for row in &t.rows {
                        s.push_str(&row.join("\t"));
                        s.push('\n');
                    }
                }
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use padic_core::Qp;

    #[test]
    fn short_fractions() {
        let q = Qp::new(3, 30);
        assert_eq!(padic(&q.ratio(5, 9), 6), "5/9");
        assert_eq!(padic(&q.ratio(-7, 2), 6), "-7/2");
        assert_eq!(padic(&q.zero(), 6), "O(p^30)");
        let big = q.int(3i64.pow(20) + 1) * q.ratio(1, 7);
        assert!(padic(&big, 6).contains("*p^0!6"));
    }
}
