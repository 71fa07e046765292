//! Job documents: typed view of the block syntax, validation and writing.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::{BigRational, Ratio};
use padic_core::padic::is_prime;
use padic_core::{parse_padic, Padic, Qp, Trunc};
use phigamma::Frame;
use robba::{Annulus, W};

use crate::grammar::{parse_tree, write_tree, Diagnostic, Node, Out, Token};

pub const DEFAULT_PRECISION: i64 = 30;
pub const DEFAULT_TARGET: i64 = 12;
/// Environment variable read by the binary for the default working precision.
pub const PRECISION_ENV: &str = "TRIANGULINE_PRECISION";

pub const MAX_RANK: usize = 3;
pub const MAX_LEVEL: u32 = 3;
pub const MAX_K: usize = 8;
pub const MAX_WINDOW: i64 = 200;
pub const MAX_BASE_ORDER: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum JobError {
    #[error("parse error{}", list(.0))]
    Parse(Vec<Diagnostic>),
    #[error("validation error{}", list(.0))]
    Validation(Vec<Diagnostic>),
}

fn list(d: &[Diagnostic]) -> String {
    d.iter().map(|x| format!("\n  {x}")).collect()
}

impl JobError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            JobError::Parse(d) | JobError::Validation(d) => d,
        }
    }
}

/// A scalar literal: a rational `a/b` or a p-adic `m*p^v!N` kept in
/// canonical text form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lit {
    Rational(BigRational),
    Padic(String),
}

impl Lit {
    pub fn to_padic(&self, q: Qp) -> Padic {
        match self {
            Lit::Rational(r) => q.rational(r),
            Lit::Padic(s) => parse_padic(q.p, s).expect("validated literal"),
        }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lit::Rational(r) => write!(f, "{r}"),
            Lit::Padic(s) => write!(f, "{s}"),
        }
    }
}

/// Element of the base S = Q_p[z]/(z^m), by coefficients in z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseLit(pub Vec<Lit>);

impl BaseLit {
    pub fn to_trunc(&self, q: Qp, m: usize) -> Trunc<Padic> {
        let mut c: Vec<Padic> = self.0.iter().map(|x| x.to_padic(q)).collect();
        c.resize(m, q.zero());
        Trunc::new(c)
    }
}

impl fmt::Display for BaseLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0[0])
        } else {
            let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", parts.join(", "))
        }
    }
}

/// A character δ: δ(p), integer weight and optional weight deformation ν.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharDef {
    pub p_value: BaseLit,
    pub weight: i64,
    pub nu: Option<BaseLit>,
}

impl CharDef {
    fn words(&self) -> Vec<String> {
        let mut v = vec![self.p_value.to_string(), self.weight.to_string()];
        if let Some(n) = &self.nu {
            v.push(n.to_string());
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub p: u32,
    /// Target precision N of certificates.
    pub target: i64,
    /// Working absolute precision of p-adic scalars.
    pub precision: i64,
    /// m in S = Q_p[z]/(z^m).
    pub base_order: usize,
    pub window: Option<i64>,
    pub annulus: Option<(W, W)>,
    pub levels: Option<u32>,
    /// Largest t-power the frame must carry.
    pub t_order: Option<u32>,
}

impl Config {
    pub fn qp(&self) -> Qp {
        Qp::new(self.p, self.precision)
    }

    pub fn like(&self) -> Trunc<Padic> {
        Trunc::constant(self.qp().one(), self.base_order)
    }

    pub fn frame(&self) -> Frame {
        if let (Some(w), Some((a, b))) = (self.window, self.annulus) {
            return Frame::new(Annulus::new(a, b), w);
        }
        match (self.t_order, self.levels) {
            (Some(j), l) => Frame::for_t_order(self.p, l.unwrap_or(1), self.target, j),
            (None, Some(l)) => Frame::standard(self.p, l, self.target),
            (None, None) => Frame::default_for(self.p, self.target),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    /// Direct sum of rank-one modules R(δ).
    Split(Vec<CharDef>),
    /// Split filtered φ-module with a refinement; `ordering` lists
    /// eigenvalue positions (1-based).
    Filtered { eigenvalues: Vec<Lit>, jumps: Vec<i64>, ordering: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleDef {
    pub id: String,
    pub kind: ModuleKind,
    /// Integer polynomials for a unimodular change of basis.
    pub scramble: Vec<Vec<i64>>,
}

impl ModuleDef {
    pub fn rank(&self) -> usize {
        match &self.kind {
            ModuleKind::Split(c) => c.len(),
            ModuleKind::Filtered { eigenvalues, .. } => eigenvalues.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamSpec {
    /// Sorted jumps of the filtered module (the parameters of the family).
    Family,
    /// Jumps induced by the refinement.
    Refinement,
    Explicit(Vec<CharDef>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryKind {
    /// φ(b) − α·b = a in the extended Robba ring with coefficients in S.
    Solve { alpha: BaseLit, a: String, radius: BigRational, den_bound: u32 },
    Sen { module: String, level: u32, k: Option<usize> },
    Period { module: String, delta: CharDef, level: u32, k: Option<usize> },
    FiniteSlope { module: String, alpha: BaseLit, level: u32, k: usize },
    Chain { module: String, params: ParamSpec, level: u32, k: Option<usize> },
    Triangulate { module: String, level: u32, k: Option<usize> },
    Locus { points: Vec<String>, params: ParamSpec, level: u32, k: Option<usize> },
    Selftest { suites: Vec<u8>, seed: u64 },
}

impl QueryKind {
    pub fn name(&self) -> &'static str {
        match self {
            QueryKind::Solve { .. } => "solve",
            QueryKind::Sen { .. } => "sen",
            QueryKind::Period { .. } => "period",
            QueryKind::FiniteSlope { .. } => "finite_slope",
            QueryKind::Chain { .. } => "chain",
            QueryKind::Triangulate { .. } => "triangulate",
            QueryKind::Locus { .. } => "locus",
            QueryKind::Selftest { .. } => "selftest",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub name: String,
    pub kind: QueryKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputOptions {
    /// Emit tab-separated tables after the structured text.
    pub tables: bool,
    /// Digits of relative precision printed for p-adic values.
    pub digits: i64,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { tables: true, digits: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobDocument {
    pub config: Config,
    pub modules: Vec<ModuleDef>,
    pub queries: Vec<Query>,
    pub output: OutputOptions,
}

impl JobDocument {
    pub fn module(&self, id: &str) -> Option<&ModuleDef> {
        self.modules.iter().find(|m| m.id == id)
    }
}

/// Defaults not written in the document.
#[derive(Clone, Copy, Debug)]
pub struct Defaults {
    pub precision: i64,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults { precision: DEFAULT_PRECISION }
    }
}

pub fn parse_job(text: &str) -> Result<JobDocument, JobError> {
    parse_job_with(text, Defaults::default())
}

pub fn parse_job_with(text: &str, defaults: Defaults) -> Result<JobDocument, JobError> {
    let tree = parse_tree(text).map_err(JobError::Parse)?;
    let mut b = Builder { parse: Vec::new(), valid: Vec::new(), p: 3 };
    let doc = b.document(&tree, defaults);
    if !b.parse.is_empty() {
        return Err(JobError::Parse(b.parse));
    }
    if !b.valid.is_empty() {
        return Err(JobError::Validation(b.valid));
    }
    Ok(doc.expect("no diagnostics"))
}

struct Builder {
    parse: Vec<Diagnostic>,
    valid: Vec<Diagnostic>,
    p: u32,
}

/// Pairs of one block, consumed key by key.
struct Fields<'a> {
    pairs: Vec<(&'a Token, &'a [Token], bool)>,
    at: (usize, usize),
}

impl<'a> Fields<'a> {
    fn new(b: &mut Builder, body: &'a [Node], at: (usize, usize)) -> Self {
        let mut pairs = Vec::new();
        for n in body {
            match n {
                Node::Pair { key, values } => pairs.push((key, values.as_slice(), false)),
                Node::Block { head, .. } => {
                    b.valid.push(Diagnostic::new(head[0].line, head[0].col, format!("unexpected block '{}'", head[0].text)))
                }
            }
        }
        Fields { pairs, at }
    }

    fn all(&mut self, key: &str) -> Vec<(&'a Token, &'a [Token])> {
        let mut out = Vec::new();
        for (k, v, used) in self.pairs.iter_mut() {
            if k.text == key {
                *used = true;
                out.push((*k, *v));
            }
        }
        out
    }

    fn one(&mut self, b: &mut Builder, key: &str) -> Option<(&'a Token, &'a [Token])> {
        let all = self.all(key);
        if all.len() > 1 {
            let k = all[1].0;
            b.valid.push(Diagnostic::new(k.line, k.col, format!("duplicate key '{key}'")));
        }
        all.into_iter().next()
    }

    fn required(&mut self, b: &mut Builder, key: &str) -> Option<(&'a Token, &'a [Token])> {
        let r = self.one(b, key);
        if r.is_none() {
            b.valid.push(Diagnostic::new(self.at.0, self.at.1, format!("missing key '{key}'")));
        }
        r
    }

    fn finish(self, b: &mut Builder) {
        for (k, _, used) in self.pairs {
            if !used {
                b.valid.push(Diagnostic::new(k.line, k.col, format!("unknown key '{}'", k.text)));
            }
        }
    }
}

impl Builder {
    fn perr(&mut self, t: &Token, msg: impl Into<String>) {
        self.parse.push(Diagnostic::new(t.line, t.col, msg));
    }

    fn verr(&mut self, t: &Token, msg: impl Into<String>) {
        self.valid.push(Diagnostic::new(t.line, t.col, msg));
    }

    fn single<'a>(&mut self, key: &Token, v: &'a [Token]) -> Option<&'a Token> {
        if v.len() != 1 {
            self.perr(key, format!("'{}' takes one value, got {}", key.text, v.len()));
            return None;
        }
        Some(&v[0])
    }

    fn int<T: std::str::FromStr>(&mut self, t: &Token) -> Option<T> {
        let r = t.text.parse::<T>().ok();
        if r.is_none() {
            self.perr(t, format!("expected an integer, got '{}'", t.text));
        }
        r
    }

    fn rational(&mut self, t: &Token) -> Option<BigRational> {
        let r = t.text.parse::<BigRational>().ok();
        if r.is_none() {
            self.perr(t, format!("expected a rational a/b, got '{}'", t.text));
        }
        r
    }

    fn small_rational(&mut self, t: &Token) -> Option<W> {
        let r = t.text.parse::<Ratio<i64>>().ok();
        if r.is_none() {
            self.perr(t, format!("expected a rational a/b, got '{}'", t.text));
        }
        r
    }

    fn lit_text(&mut self, t: &Token, s: &str) -> Option<Lit> {
        let s = s.trim();
        if s.contains('!') {
            match parse_padic(self.p, s) {
                Ok(x) => Some(Lit::Padic(x.to_string())),
                Err(_) => {
                    self.perr(t, format!("bad p-adic literal '{s}' (expected m*p^v!N)"));
                    None
                }
            }
        } else {
            match s.parse::<BigRational>() {
                Ok(r) => Some(Lit::Rational(r)),
                Err(_) => {
                    self.perr(t, format!("bad literal '{s}'"));
                    None
                }
            }
        }
    }

    fn lit(&mut self, t: &Token) -> Option<Lit> {
        self.lit_text(t, &t.text.clone())
    }

    fn base(&mut self, t: &Token) -> Option<BaseLit> {
        if let Some(inner) = t.text.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let parts: Vec<Option<Lit>> = inner.split(',').map(|s| self.lit_text(t, s)).collect();
            let parts: Option<Vec<Lit>> = parts.into_iter().collect();
            let parts = parts?;
            if parts.is_empty() {
                self.perr(t, "empty base element");
                return None;
            }
            Some(BaseLit(parts))
        } else {
            self.lit(t).map(|l| BaseLit(vec![l]))
        }
    }

    fn chardef(&mut self, key: &Token, v: &[Token]) -> Option<CharDef> {
        if v.len() < 2 || v.len() > 3 {
            self.perr(key, "a character is written `δ(p) weight [ν]`");
            return None;
        }
        let p_value = self.base(&v[0]);
        let weight = self.int::<i64>(&v[1]);
        let nu = if v.len() == 3 { Some(self.base(&v[2])?) } else { None };
        Some(CharDef { p_value: p_value?, weight: weight?, nu })
    }

    fn document(&mut self, tree: &[Node], defaults: Defaults) -> Option<JobDocument> {
        // first pass: the prime, needed to read p-adic literals
        for n in tree {
            if let Node::Pair { key, values } = n {
                if key.text == "p" && values.len() == 1 {
                    if let Ok(p) = values[0].text.parse::<u32>() {
                        if p >= 3 && is_prime(p) {
                            self.p = p;
                        }
                    }
                }
            }
        }
        let mut top = Vec::new();
        let mut module_nodes = Vec::new();
        let mut query_nodes = Vec::new();
        let mut output_node = None;
        for n in tree {
            match n {
                Node::Pair { .. } => top.push(n.clone()),
                Node::Block { head, body } => match head[0].text.as_str() {
                    "module" => module_nodes.push((head, body)),
                    "query" => query_nodes.push((head, body)),
                    "output" => {
                        if output_node.is_some() {
                            self.verr(&head[0], "duplicate output block");
                        }
                        output_node = Some((head, body));
                    }
                    other => self.verr(&head[0], format!("unknown block '{other}'")),
                },
            }
        }
        let config = self.config(&top, defaults);
        let output = match output_node {
            Some((h, b)) => self.output(h, b),
            None => Some(OutputOptions::default()),
        };
        let mut modules = Vec::new();
        let mut seen = BTreeSet::new();
        for (h, b) in module_nodes {
            if let Some(m) = self.module(h, b) {
                if !seen.insert(m.id.clone()) {
                    self.verr(&h[1], format!("duplicate module '{}'", m.id));
                }
                modules.push(m);
            }
        }
        let mut queries = Vec::new();
        let mut names = BTreeSet::new();
        for (h, b) in query_nodes {
            if let Some(q) = self.query(h, b, &modules, config.as_ref()) {
                if !names.insert(q.name.clone()) {
                    self.verr(&h[1], format!("duplicate query '{}'", q.name));
                }
                queries.push(q);
            }
        }
        if let Some(c) = &config {
            for m in &modules {
                if let ModuleKind::Split(cs) = &m.kind {
                    for ch in cs {
                        let too_long = ch.p_value.0.len() > c.base_order || ch.nu.as_ref().is_some_and(|n| n.0.len() > c.base_order);
                        if too_long {
                            self.valid.push(Diagnostic::new(1, 1, format!("module '{}': base element longer than base = {}", m.id, c.base_order)));
                        }
                    }
                }
            }
        }
        Some(JobDocument { config: config?, modules, queries, output: output? })
    }

    fn config(&mut self, top: &[Node], defaults: Defaults) -> Option<Config> {
        let mut f = Fields::new(self, top, (1, 1));
        let p = f.required(self, "p").and_then(|(k, v)| self.single(k, v).cloned()).and_then(|t| {
            let p = self.int::<u32>(&t)?;
            if p < 3 || !is_prime(p) {
                self.verr(&t, format!("p = {p} is not an odd prime"));
                return None;
            }
            Some(p)
        });
        let mut int_key = |b: &mut Builder, key: &str, lo: i64, hi: i64| -> Option<Option<i64>> {
            match f.one(b, key) {
                None => Some(None),
                Some((k, v)) => {
                    let t = b.single(k, v)?.clone();
                    let x = b.int::<i64>(&t)?;
                    if x < lo || x > hi {
                        b.verr(&t, format!("{key} = {x} outside [{lo}, {hi}]"));
                        return None;
                    }
                    Some(Some(x))
                }
            }
        };
        let target = int_key(self, "N", 2, 60);
        let precision = int_key(self, "precision", 8, 400);
        let base = int_key(self, "base", 1, MAX_BASE_ORDER as i64);
        let window = int_key(self, "window", 4, MAX_WINDOW);
        let levels = int_key(self, "levels", 1, MAX_LEVEL as i64);
        let t_order = int_key(self, "t_order", 0, 16);
        let annulus = match f.one(self, "annulus") {
            None => Some(None),
            Some((k, v)) => {
                if v.len() != 2 {
                    self.perr(k, "annulus takes two radii r1 r2");
                    None
                } else {
                    let a = self.small_rational(&v[0]);
                    let b = self.small_rational(&v[1]);
                    match (a, b) {
                        (Some(a), Some(b)) if a > W::from_integer(0) && a <= b => Some(Some((a, b))),
                        (Some(_), Some(_)) => {
                            self.verr(&v[0], "annulus needs 0 < r1 <= r2");
                            None
                        }
                        _ => None,
                    }
                }
            }
        };
        f.finish(self);
        let (p, target, precision, base, window, levels, t_order, annulus) =
            (p?, target?, precision?, base?, window?, levels?, t_order?, annulus?);
        if window.is_some() != annulus.is_some() {
            self.valid.push(Diagnostic::new(1, 1, "window and annulus must be given together"));
        }
        let target = target.unwrap_or(DEFAULT_TARGET);
        let precision = precision.unwrap_or(defaults.precision);
        if precision < target + 4 {
            self.valid.push(Diagnostic::new(1, 1, format!("precision {precision} must exceed N = {target} by at least 4")));
        }
        let c = Config {
            p,
            target,
            precision,
            base_order: base.unwrap_or(1) as usize,
            window,
            annulus,
            levels: levels.map(|x| x as u32),
            t_order: t_order.map(|x| x as u32),
        };
        if c.frame().window > MAX_WINDOW {
            self.valid.push(Diagnostic::new(1, 1, format!("frame window {} exceeds {MAX_WINDOW}", c.frame().window)));
        }
        Some(c)
    }

    fn output(&mut self, head: &[Token], body: &[Node]) -> Option<OutputOptions> {
        if head.len() != 1 {
            self.verr(&head[1], "output block takes no name");
        }
        let mut f = Fields::new(self, body, (head[0].line, head[0].col));
        let mut o = OutputOptions::default();
        if let Some((k, v)) = f.one(self, "tables") {
            match self.single(k, v).map(|t| t.text.as_str()) {
                Some("tsv") => o.tables = true,
                Some("none") => o.tables = false,
                Some(_) => self.perr(&v[0], "tables is `tsv` or `none`"),
                None => {}
            }
        }
        if let Some((k, v)) = f.one(self, "digits") {
            if let Some(t) = self.single(k, v).cloned() {
                match self.int::<i64>(&t) {
                    Some(d) if (1..=60).contains(&d) => o.digits = d,
                    Some(_) => self.verr(&t, "digits outside [1, 60]"),
                    None => {}
                }
            }
        }
        f.finish(self);
        Some(o)
    }

    fn scramble(&mut self, f: &mut Fields, rank: usize) -> Vec<Vec<i64>> {
        let Some((k, v)) = f.one(self, "scramble") else { return Vec::new() };
        let mut out = Vec::new();
        for t in v {
            let Some(inner) = t.text.strip_prefix('[').and_then(|x| x.strip_suffix(']')) else {
                self.perr(t, "scramble entries are integer polynomials `[c0, c1, ...]`");
                continue;
            };
            let cs: Result<Vec<i64>, _> = inner.split(',').map(|s| s.trim().parse::<i64>()).collect();
            match cs {
                Ok(c) if !c.is_empty() => out.push(c),
                _ => self.perr(t, "scramble entries are integer polynomials `[c0, c1, ...]`"),
            }
        }
        if rank < 2 && !out.is_empty() {
            self.verr(k, "scramble needs rank >= 2");
        }
        out
    }

    fn module(&mut self, head: &[Token], body: &[Node]) -> Option<ModuleDef> {
        if head.len() != 2 {
            self.perr(&head[0], "module header is `module <id> {`");
            return None;
        }
        let id = head[1].text.clone();
        let mut f = Fields::new(self, body, (head[0].line, head[0].col));
        let chars: Vec<(&Token, &[Token])> = f.all("rank1");
        let eig = f.one(self, "eigenvalues");
        let kind = if !chars.is_empty() {
            if eig.is_some() {
                self.verr(&head[1], "a module is either a sum of rank1 lines or a filtered module");
            }
            let cs: Vec<Option<CharDef>> = chars.iter().map(|(k, v)| self.chardef(k, v)).collect();
            let cs: Option<Vec<CharDef>> = cs.into_iter().collect();
            cs.map(ModuleKind::Split)
        } else if let Some((_, ev)) = eig {
            let eigenvalues: Option<Vec<Lit>> = ev.iter().map(|t| self.lit(t)).collect::<Vec<_>>().into_iter().collect();
            let jumps = f.required(self, "jumps").and_then(|(_, v)| v.iter().map(|t| self.int::<i64>(t)).collect::<Vec<_>>().into_iter().collect::<Option<Vec<i64>>>());
            let ordering = match f.one(self, "ordering") {
                Some((_, v)) => v.iter().map(|t| self.int::<usize>(t)).collect::<Vec<_>>().into_iter().collect::<Option<Vec<usize>>>(),
                None => eigenvalues.as_ref().map(|e| (1..=e.len()).collect()),
            };
            let (eigenvalues, jumps, ordering) = (eigenvalues?, jumps?, ordering?);
            let d = eigenvalues.len();
            if jumps.len() != d {
                self.verr(&head[1], format!("{} jumps for {d} eigenvalues", jumps.len()));
            }
            let mut sorted = ordering.clone();
            sorted.sort();
            if sorted != (1..=d).collect::<Vec<_>>() {
                self.verr(&head[1], format!("ordering must be a permutation of 1..{d}"));
            }
            Some(ModuleKind::Filtered { eigenvalues, jumps, ordering })
        } else {
            self.verr(&head[1], format!("module '{id}' has neither rank1 lines nor eigenvalues"));
            None
        };
        let kind = kind?;
        let rank = match &kind {
            ModuleKind::Split(c) => c.len(),
            ModuleKind::Filtered { eigenvalues, .. } => eigenvalues.len(),
        };
        if rank > MAX_RANK {
            self.verr(&head[1], format!("rank {rank} exceeds {MAX_RANK}"));
        }
        let scramble = self.scramble(&mut f, rank);
        f.finish(self);
        Some(ModuleDef { id, kind, scramble })
    }

    fn module_ref(&mut self, f: &mut Fields, key: &str, modules: &[ModuleDef], filtered: bool) -> Option<String> {
        let (k, v) = f.required(self, key)?;
        let t = self.single(k, v)?.clone();
        match modules.iter().find(|m| m.id == t.text) {
            None => {
                self.verr(&t, format!("unknown module '{}'", t.text));
                None
            }
            Some(m) if filtered && !matches!(m.kind, ModuleKind::Filtered { .. }) => {
                self.verr(&t, format!("module '{}' is not a filtered module", t.text));
                None
            }
            Some(_) => Some(t.text),
        }
    }

    fn level(&mut self, f: &mut Fields) -> Option<u32> {
        match f.one(self, "level") {
            None => Some(1),
            Some((k, v)) => {
                let t = self.single(k, v)?.clone();
                let n = self.int::<u32>(&t)?;
                if n == 0 || n > MAX_LEVEL {
                    self.verr(&t, format!("level {n} outside [1, {MAX_LEVEL}]"));
                    return None;
                }
                Some(n)
            }
        }
    }

    fn k_opt(&mut self, f: &mut Fields) -> Option<Option<usize>> {
        match f.one(self, "k") {
            None => Some(None),
            Some((k, v)) => {
                let t = self.single(k, v)?.clone();
                if t.text == "auto" {
                    return Some(None);
                }
                let x = self.int::<usize>(&t)?;
                if x == 0 || x > MAX_K {
                    self.verr(&t, format!("k = {x} outside [1, {MAX_K}]"));
                    return None;
                }
                Some(Some(x))
            }
        }
    }

    fn params(&mut self, f: &mut Fields) -> Option<ParamSpec> {
        let deltas = f.all("delta");
        let spec = f.one(self, "parameters");
        match (spec, deltas.is_empty()) {
            (Some((k, _)), false) => {
                self.verr(k, "give either `parameters` or `delta` lines");
                None
            }
            (Some((k, v)), true) => match self.single(k, v)?.text.as_str() {
                "family" => Some(ParamSpec::Family),
                "refinement" => Some(ParamSpec::Refinement),
                _ => {
                    self.perr(&v[0], "parameters is `family` or `refinement`");
                    None
                }
            },
            (None, false) => {
                let cs: Vec<Option<CharDef>> = deltas.iter().map(|(k, v)| self.chardef(k, v)).collect();
                cs.into_iter().collect::<Option<Vec<_>>>().map(ParamSpec::Explicit)
            }
            (None, true) => Some(ParamSpec::Refinement),
        }
    }

    fn query(&mut self, head: &[Token], body: &[Node], modules: &[ModuleDef], config: Option<&Config>) -> Option<Query> {
        if head.len() != 3 {
            self.perr(&head[0], "query header is `query <name> <kind> {`");
            return None;
        }
        let name = head[1].text.clone();
        let kt = &head[2];
        let mut f = Fields::new(self, body, (head[0].line, head[0].col));
        let kind = match kt.text.as_str() {
            "solve" => {
                let alpha = f.required(self, "alpha").and_then(|(k, v)| self.single(k, v).cloned()).and_then(|t| self.base(&t));
                let a = f.required(self, "a").and_then(|(k, v)| self.single(k, v).cloned());
                let a = a.and_then(|t| {
                    if t.text.starts_with('[') {
                        Some(t.text)
                    } else {
                        self.perr(&t, "a is written `[(exponent, coefficient), ...]`");
                        None
                    }
                });
                let radius = match f.one(self, "radius") {
                    Some((k, v)) => self.single(k, v).cloned().and_then(|t| self.rational(&t)),
                    None => Some(BigRational::from_integer(1.into())),
                };
                let den_bound = match f.one(self, "den_bound") {
                    Some((k, v)) => self.single(k, v).cloned().and_then(|t| self.int::<u32>(&t)),
                    None => Some(2),
                };
                let (alpha, a, radius, den_bound) = (alpha?, a?, radius?, den_bound?);
                if radius <= BigRational::from_integer(0.into()) {
                    self.verr(&head[1], "radius must be positive");
                }
                if den_bound > 6 {
                    self.verr(&head[1], "den_bound above 6");
                }
                Some(QueryKind::Solve { alpha, a, radius, den_bound })
            }
            "sen" => {
                let module = self.module_ref(&mut f, "module", modules, false);
                let level = self.level(&mut f);
                let k = self.k_opt(&mut f);
                Some(QueryKind::Sen { module: module?, level: level?, k: k? })
            }
            "period" => {
                let module = self.module_ref(&mut f, "module", modules, false);
                let delta = f.required(self, "delta").and_then(|(k, v)| self.chardef(k, v));
                let level = self.level(&mut f);
                let k = self.k_opt(&mut f);
                Some(QueryKind::Period { module: module?, delta: delta?, level: level?, k: k? })
            }
            "finite_slope" => {
                let module = self.module_ref(&mut f, "module", modules, false);
                let alpha = f.required(self, "alpha").and_then(|(k, v)| self.single(k, v).cloned()).and_then(|t| self.base(&t));
                let level = self.level(&mut f);
                let k = self.k_opt(&mut f);
                Some(QueryKind::FiniteSlope { module: module?, alpha: alpha?, level: level?, k: k?.unwrap_or(1) })
            }
            "chain" => {
                let module = self.module_ref(&mut f, "module", modules, false);
                let params = self.params(&mut f);
                let level = self.level(&mut f);
                let k = self.k_opt(&mut f);
                let (module, params) = (module?, params?);
                let filtered = matches!(modules.iter().find(|m| m.id == module).map(|m| &m.kind), Some(ModuleKind::Filtered { .. }));
                if !filtered && !matches!(params, ParamSpec::Explicit(_)) {
                    self.verr(&head[1], "a split module needs explicit `delta` lines");
                }
                Some(QueryKind::Chain { module, params, level: level?, k: k? })
            }
            "triangulate" => {
                let module = self.module_ref(&mut f, "module", modules, true);
                let level = self.level(&mut f);
                let k = self.k_opt(&mut f);
                Some(QueryKind::Triangulate { module: module?, level: level?, k: k? })
            }
            "locus" => {
                let mut points = Vec::new();
                for (k, v) in f.all("point") {
                    if let Some(t) = self.single(k, v).cloned() {
                        match modules.iter().find(|m| m.id == t.text) {
                            None => self.verr(&t, format!("unknown module '{}'", t.text)),
                            Some(m) if !matches!(m.kind, ModuleKind::Filtered { .. }) => {
                                self.verr(&t, format!("module '{}' is not a filtered module", t.text))
                            }
                            Some(_) => points.push(t.text),
                        }
                    }
                }
                if points.is_empty() {
                    self.verr(&head[1], "locus needs at least one `point`");
                }
                let params = self.params(&mut f);
                if matches!(params, Some(ParamSpec::Explicit(_))) {
                    self.verr(&head[1], "locus parameters are `family` or `refinement`");
                }
                let level = self.level(&mut f);
                let k = self.k_opt(&mut f);
                Some(QueryKind::Locus { points, params: params?, level: level?, k: k? })
            }
            "selftest" => {
                let suites = match f.one(self, "suites") {
                    Some((_, v)) => v.iter().map(|t| self.int::<u8>(t)).collect::<Vec<_>>().into_iter().collect::<Option<Vec<u8>>>(),
                    None => Some((1..=7).collect()),
                };
                if let Some(s) = &suites {
                    if s.iter().any(|&x| x == 0 || x > 7) {
                        self.verr(&head[1], "suites are numbered 1 to 7");
                    }
                }
                let seed = match f.one(self, "seed") {
                    Some((k, v)) => self.single(k, v).cloned().and_then(|t| self.int::<u64>(&t)),
                    None => Some(crate::suites::DEFAULT_SEED),
                };
                Some(QueryKind::Selftest { suites: suites?, seed: seed? })
            }
            other => {
                self.verr(kt, format!("unknown query kind '{other}'"));
                None
            }
        };
        f.finish(self);
        let kind = kind?;
        if let (Some(c), QueryKind::Solve { alpha, .. }) = (config, &kind) {
            if alpha.0.len() > c.base_order {
                self.verr(&head[1], format!("alpha longer than base = {}", c.base_order));
            }
        }
        Some(Query { name, kind })
    }
}

fn char_out(key: &str, c: &CharDef) -> Out {
    Out::Pair(key.into(), c.words())
}

/// Writes a document back to text; `parse_job` of the result gives an equal document.
pub fn serialize(doc: &JobDocument) -> String {
    let c = &doc.config;
    let mut out = vec![
        Out::Pair("p".into(), vec![c.p.to_string()]),
        Out::Pair("N".into(), vec![c.target.to_string()]),
        Out::Pair("precision".into(), vec![c.precision.to_string()]),
        Out::Pair("base".into(), vec![c.base_order.to_string()]),
    ];
    if let Some(w) = c.window {
        out.push(Out::Pair("window".into(), vec![w.to_string()]));
    }
    if let Some((a, b)) = c.annulus {
        out.push(Out::Pair("annulus".into(), vec![a.to_string(), b.to_string()]));
    }
    if let Some(l) = c.levels {
        out.push(Out::Pair("levels".into(), vec![l.to_string()]));
    }
    if let Some(j) = c.t_order {
        out.push(Out::Pair("t_order".into(), vec![j.to_string()]));
    }
    out.push(Out::Block(
        vec!["output".into()],
        vec![
            Out::Pair("tables".into(), vec![if doc.output.tables { "tsv" } else { "none" }.into()]),
            Out::Pair("digits".into(), vec![doc.output.digits.to_string()]),
        ],
    ));
    for m in &doc.modules {
        let mut body = Vec::new();
        match &m.kind {
            ModuleKind::Split(cs) => body.extend(cs.iter().map(|c| char_out("rank1", c))),
            ModuleKind::Filtered { eigenvalues, jumps, ordering } => {
                body.push(Out::Pair("eigenvalues".into(), eigenvalues.iter().map(|x| x.to_string()).collect()));
                body.push(Out::Pair("jumps".into(), jumps.iter().map(|x| x.to_string()).collect()));
                body.push(Out::Pair("ordering".into(), ordering.iter().map(|x| x.to_string()).collect()));
            }
        }
        if !m.scramble.is_empty() {
            let polys = m.scramble.iter().map(|p| format!("[{}]", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))).collect();
            body.push(Out::Pair("scramble".into(), polys));
        }
        out.push(Out::Block(vec!["module".into(), m.id.clone()], body));
    }
    for q in &doc.queries {
        let mut body = Vec::new();
        let mut kv = |k: &str, v: String| body.push(Out::Pair(k.into(), vec![v]));
        let k_text = |k: &Option<usize>| k.map_or("auto".to_string(), |x| x.to_string());
        let mut extra = Vec::new();
        match &q.kind {
            QueryKind::Solve { alpha, a, radius, den_bound } => {
                kv("alpha", alpha.to_string());
                kv("a", a.clone());
                kv("radius", radius.to_string());
                kv("den_bound", den_bound.to_string());
            }
            QueryKind::Sen { module, level, k } => {
                kv("module", module.clone());
                kv("level", level.to_string());
                kv("k", k_text(k));
            }
            QueryKind::Period { module, delta, level, k } => {
                kv("module", module.clone());
                extra.push(char_out("delta", delta));
                kv("level", level.to_string());
                kv("k", k_text(k));
            }
            QueryKind::FiniteSlope { module, alpha, level, k } => {
                kv("module", module.clone());
                kv("alpha", alpha.to_string());
                kv("level", level.to_string());
                kv("k", k.to_string());
            }
            QueryKind::Chain { module, params, level, k } => {
                kv("module", module.clone());
                extra.extend(params_out(params));
                kv("level", level.to_string());
                kv("k", k_text(k));
            }
            QueryKind::Triangulate { module, level, k } => {
                kv("module", module.clone());
                kv("level", level.to_string());
                kv("k", k_text(k));
            }
            QueryKind::Locus { points, params, level, k } => {
                for p in points {
                    kv("point", p.clone());
                }
                extra.extend(params_out(params));
                kv("level", level.to_string());
                kv("k", k_text(k));
            }
            QueryKind::Selftest { suites, seed } => {
                body.push(Out::Pair("suites".into(), suites.iter().map(|s| s.to_string()).collect()));
                body.push(Out::Pair("seed".into(), vec![seed.to_string()]));
            }
        }
        body.extend(extra);
        out.push(Out::Block(vec!["query".into(), q.name.clone(), q.kind.name().into()], body));
    }
    write_tree(&out)
}

fn params_out(p: &ParamSpec) -> Vec<Out> {
    match p {
        ParamSpec::Family => vec![Out::Pair("parameters".into(), vec!["family".into()])],
        ParamSpec::Refinement => vec![Out::Pair("parameters".into(), vec!["refinement".into()])],
        ParamSpec::Explicit(cs) => cs.iter().map(|c| char_out("delta", c)).collect(),
    }
}
