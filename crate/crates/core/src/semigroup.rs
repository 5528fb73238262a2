//! Finite semigroups as Cayley tables.
//!
//! Elements are the indices `0..n`; labels are only used for display. The
//! standard constructions fix these conventions:
//!
//! * `cyclic(k)`: `i*j = (i+j) mod k`, element 0 is the identity.
//! * `left_zero(k)` / `right_zero(k)`: `xy = x` / `xy = y`.
//! * `null(k)`: element 0 is the zero `z`, every product is `z`.
//! * `truncated_add(m)`: index `i` is the number `i+1`, `x⊕y = min(x+y, m)`.
//! * `chain(k)`: `xy = min(x, y)`; `chain(2)` is `({0,1},·)`.
//! * `product(S, T)`: pair `(s, t)` has index `s*|T| + t`.
//! * `adjoin_identity(S)` / `adjoin_zero(S)`: the new element is last.

use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SemigroupJson", into = "SemigroupJson")]
pub struct Semigroup {
    n: usize,
    table: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct SemigroupJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<SemigroupJson> for Semigroup {
    type Error = Error;

    fn try_from(j: SemigroupJson) -> Result<Self> {
        if let Some(n) = j.n {
            if n != j.table.len() {
                return Err(Error::MalformedTable(format!(
                    "n = {n} but the table has {} rows",
                    j.table.len()
                )));
            }
        }
        let s = Semigroup::new(j.table)?;
        match j.labels {
            Some(l) => s.with_labels(l),
            None => Ok(s),
        }
    }
}

impl From<Semigroup> for SemigroupJson {
    fn from(s: Semigroup) -> Self {
        SemigroupJson {
            n: Some(s.n),
            labels: Some(s.labels()),
            table: s.table,
        }
    }
}

/// Index and period of an element: the least `m, p >= 1` with `x^(m+p) = x^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexPeriod {
    pub m: usize,
    pub p: usize,
}

fn validate_shape(table: &[Vec<usize>]) -> Result<()> {
    let n = table.len();
    if n == 0 {
        return Err(Error::MalformedTable("empty table".into()));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(Error::MalformedTable(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|&v| v >= n) {
            return Err(Error::MalformedTable(format!(
                "entry ({i},{j}) = {} is out of range",
                row[j]
            )));
        }
    }
    Ok(())
}

/// First triple `(x, y, z)` in row-major order with `(xy)z != x(yz)`, or
/// `None` when the table is associative.
pub fn check_associativity(table: &[Vec<usize>]) -> Result<Option<(usize, usize, usize)>> {
    validate_shape(table)?;
    Ok(first_violation(table))
}

fn first_violation(t: &[Vec<usize>]) -> Option<(usize, usize, usize)> {
    let n = t.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if t[t[x][y]][z] != t[x][t[y][z]] {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

impl Semigroup {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        if let Some((x, y, z)) = check_associativity(&table)? {
            return Err(Error::NotAssociative(x, y, z));
        }
        Ok(Semigroup {
            n: table.len(),
            table,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::MalformedTable(format!(
                "{} labels for {} elements",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    fn labelled(table: Vec<Vec<usize>>, labels: Vec<String>) -> Self {
        debug_assert!(first_violation(&table).is_none());
        Semigroup {
            n: table.len(),
            table,
            labels: Some(labels),
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn labels(&self) -> Vec<String> {
        self.labels
            .clone()
            .unwrap_or_else(|| (0..self.n).map(|i| i.to_string()).collect())
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    /// `x^k` for `k >= 1`.
    pub fn pow(&self, x: usize, k: usize) -> usize {
        assert!(k >= 1);
        (1..k).fold(x, |acc, _| self.mul(acc, x))
    }

    pub fn index_period(&self, x: usize) -> IndexPeriod {
        // powers[k] = x^(k+1); the sequence must repeat within n+1 steps
        let mut powers = vec![x];
        loop {
            let next = self.mul(*powers.last().unwrap(), x);
            if let Some(m) = powers.iter().position(|&p| p == next) {
                return IndexPeriod {
                    m: m + 1,
                    p: powers.len() - m,
                };
            }
            powers.push(next);
        }
    }

    /// Whether `x` lies in `S·S`.
    pub fn is_product(&self, x: usize) -> bool {
        self.table.iter().any(|row| row.contains(&x))
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.n).all(|x| (0..x).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    /// Pairs `(x, y)` in row-major order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| (0..self.n).map(move |y| (x, y)))
    }

    /// Table relabelled by `perm` (element `x` becomes `perm[x]`).
    pub fn relabel(&self, perm: &[usize]) -> Semigroup {
        let mut t = vec![vec![0; self.n]; self.n];
        for (x, y) in self.pairs() {
            t[perm[x]][perm[y]] = perm[self.mul(x, y)];
        }
        Semigroup {
            n: self.n,
            table: t,
            labels: None,
        }
    }

    /// Lexicographically least table among all relabellings.
    pub fn canonical_form(&self) -> Semigroup {
        (0..self.n)
            .permutations(self.n)
            .map(|p| self.relabel(&p))
            .min_by(|a, b| a.table.cmp(&b.table))
            .expect("at least one permutation")
    }

    pub fn is_isomorphic(&self, other: &Semigroup) -> bool {
        self.n == other.n && self.canonical_form().table == other.canonical_form().table
    }
}

impl fmt::Display for Semigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels = self.labels();
        let w = labels.iter().map(String::len).max().unwrap_or(1);
        write!(f, "{:w$} |", "")?;
        for l in &labels {
            write!(f, " {l:>w$}")?;
        }
        writeln!(f)?;
        for (x, row) in self.table.iter().enumerate() {
            write!(f, "{:>w$} |", labels[x])?;
            for &v in row {
                write!(f, " {:>w$}", labels[v])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn positive(k: usize, what: &str) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidParameter(format!(
            "{what} must be at least 1"
        )))
    } else {
        Ok(())
    }
}

pub fn cyclic(k: usize) -> Result<Semigroup> {
    positive(k, "cyclic order")?;
    let table = (0..k)
        .map(|i| (0..k).map(|j| (i + j) % k).collect())
        .collect();
    let labels = (0..k)
        .map(|i| match i {
            0 => "e".to_string(),
            1 => "s".to_string(),
            _ => format!("s{i}"),
        })
        .collect();
    Ok(Semigroup::labelled(table, labels))
}

pub fn left_zero(k: usize) -> Result<Semigroup> {
    positive(k, "left zero order")?;
    let table = (0..k).map(|i| vec![i; k]).collect();
    Ok(Semigroup::labelled(
        table,
        (0..k).map(|i| format!("l{i}")).collect(),
    ))
}

pub fn right_zero(k: usize) -> Result<Semigroup> {
    positive(k, "right zero order")?;
    let table = (0..k).map(|_| (0..k).collect()).collect();
    Ok(Semigroup::labelled(
        table,
        (0..k).map(|i| format!("r{i}")).collect(),
    ))
}

pub fn null(k: usize) -> Result<Semigroup> {
    positive(k, "null semigroup order")?;
    let labels = (0..k)
        .map(|i| match (i, k) {
            (0, _) => "z".to_string(),
            (1, 2) => "a".to_string(),
            _ => format!("a{i}"),
        })
        .collect();
    Ok(Semigroup::labelled(vec![vec![0; k]; k], labels))
}

pub fn truncated_add(m: usize) -> Result<Semigroup> {
    positive(m, "truncation bound")?;
    let table = (0..m)
        .map(|i| (0..m).map(|j| (i + j + 1).min(m - 1)).collect())
        .collect();
    Ok(Semigroup::labelled(
        table,
        (1..=m).map(|i| i.to_string()).collect(),
    ))
}

pub fn chain(k: usize) -> Result<Semigroup> {
    positive(k, "chain length")?;
    let table = (0..k).map(|i| (0..k).map(|j| i.min(j)).collect()).collect();
    Ok(Semigroup::labelled(
        table,
        (0..k).map(|i| i.to_string()).collect(),
    ))
}

pub fn product(a: &Semigroup, b: &Semigroup) -> Semigroup {
    let (na, nb) = (a.n, b.n);
    let mut table = vec![vec![0; na * nb]; na * nb];
    for (x, y) in (0..na * nb).cartesian_product(0..na * nb) {
        table[x][y] = a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb);
    }
    let labels = (0..na * nb)
        .map(|x| format!("({},{})", a.label(x / nb), b.label(x % nb)))
        .collect();
    Semigroup::labelled(table, labels)
}

pub fn adjoin_identity(s: &Semigroup) -> Semigroup {
    let n = s.n;
    let mut table: Vec<Vec<usize>> = s
        .table
        .iter()
        .map(|r| r.iter().copied().chain([0]).collect())
        .collect();
    for (x, row) in table.iter_mut().enumerate() {
        row[n] = x;
    }
    table.push((0..=n).collect());
    let mut labels = s.labels();
    labels.push("1".to_string());
    Semigroup::labelled(table, labels)
}

pub fn adjoin_zero(s: &Semigroup) -> Semigroup {
    let n = s.n;
    let mut table: Vec<Vec<usize>> = s
        .table
        .iter()
        .map(|r| r.iter().copied().chain([n]).collect())
        .collect();
    table.push(vec![n; n + 1]);
    let mut labels = s.labels();
    labels.push("0".to_string());
    Semigroup::labelled(table, labels)
}

/// Parses expressions such as `cyclic(3)` or `adjoin_identity(null(2))`.
pub fn parse_expr(src: &str) -> Result<Semigroup> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let s = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(s)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::UnknownSemigroup(format!(
            "{msg} at offset {} in `{}`",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self
            .src
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize> {
        let tok = self.ident()?;
        tok.parse()
            .map_err(|_| self.error(&format!("expected a number, found `{tok}`")))
    }

    fn expr(&mut self) -> Result<Semigroup> {
        let name = self.ident()?;
        let sized: Option<fn(usize) -> Result<Semigroup>> = match name.as_str() {
            "cyclic" => Some(cyclic),
            "left_zero" => Some(left_zero),
            "right_zero" => Some(right_zero),
            "null" => Some(null),
            "truncated_add" => Some(truncated_add),
            "chain" => Some(chain),
            _ => None,
        };
        self.eat(b'(')?;
        let s = if let Some(make) = sized {
            make(self.number()?)?
        } else {
            match name.as_str() {
                "product" => {
                    let a = self.expr()?;
                    self.eat(b',')?;
                    let b = self.expr()?;
                    product(&a, &b)
                }
                "adjoin_identity" => adjoin_identity(&self.expr()?),
                "adjoin_zero" => adjoin_zero(&self.expr()?),
                _ => return Err(Error::UnknownSemigroup(name)),
            }
        };
        self.eat(b')')?;
        Ok(s)
    }
}

/// Largest order enumerated without an explicit opt-in.
pub const ENUMERATION_CAP: usize = 3;

/// All associative tables on `n` elements in lexicographic order.
///
/// Orders up to [`ENUMERATION_CAP`] filter every one of the `n^(n²)` tables.
/// Order 4 needs `allow_n4`; it fills the table cell by cell in parallel and
/// prunes a branch as soon as a fully determined triple fails to associate,
/// which visits the same set of tables without materializing all 4^16.
pub fn enumerate_semigroups(n: usize, allow_n4: bool) -> Result<Vec<Semigroup>> {
    match n {
        0 => Err(Error::InvalidParameter("order must be at least 1".into())),
        1..=ENUMERATION_CAP => Ok(exhaustive_filter(n)),
        4 if allow_n4 => Ok(pruned_search(n)),
        _ => Err(Error::EnumerationCap(n)),
    }
}

fn exhaustive_filter(n: usize) -> Vec<Semigroup> {
    let cells = n * n;
    let total = n.pow(cells as u32);
    (0..total)
        .into_par_iter()
        .filter_map(|code| {
            // most significant digit is cell (0,0), so codes run in lexicographic order
            let mut digits = vec![0; cells];
            let mut c = code;
            for d in digits.iter_mut().rev() {
                *d = c % n;
                c /= n;
            }
            let table: Vec<Vec<usize>> = digits.chunks(n).map(<[usize]>::to_vec).collect();
            first_violation(&table).is_none().then_some(Semigroup {
                n,
                table,
                labels: None,
            })
        })
        .collect()
}

fn pruned_search(n: usize) -> Vec<Semigroup> {
    const UNSET: usize = usize::MAX;
    fn consistent(t: &[usize], n: usize) -> bool {
        for x in 0..n {
            for y in 0..n {
                let xy = t[x * n + y];
                if xy == UNSET {
                    continue;
                }
                for z in 0..n {
                    let yz = t[y * n + z];
                    if yz == UNSET {
                        continue;
                    }
                    let (l, r) = (t[xy * n + z], t[x * n + yz]);
                    if l != UNSET && r != UNSET && l != r {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn fill(t: &mut Vec<usize>, cell: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if cell == n * n {
            out.push(t.clone());
            return;
        }
        for v in 0..n {
            t[cell] = v;
            if consistent(t, n) {
                fill(t, cell + 1, n, out);
            }
        }
        t[cell] = UNSET;
    }
    // split on the first two cells, which keeps lexicographic order after concatenation
    let prefixes: Vec<(usize, usize)> = (0..n).cartesian_product(0..n).collect();
    prefixes
        .into_par_iter()
        .flat_map_iter(|(a, b)| {
            let mut t = vec![UNSET; n * n];
            t[0] = a;
            t[1] = b;
            let mut out = Vec::new();
            if consistent(&t, n) {
                fill(&mut t, 2, n, &mut out);
            }
            out.into_iter()
        })
        .map(|flat| Semigroup {
            n,
            table: flat.chunks(n).map(<[usize]>::to_vec).collect(),
            labels: None,
        })
        .collect()
}

/// One canonical representative per isomorphism class, sorted by table.
pub fn dedup_isomorphic(list: &[Semigroup]) -> Vec<Semigroup> {
    let mut reps: Vec<Semigroup> = list.par_iter().map(Semigroup::canonical_form).collect();
    reps.sort_by(|a, b| (a.n, &a.table).cmp(&(b.n, &b.table)));
    reps.dedup_by(|a, b| a.table == b.table);
    reps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_add_matches_formula() {
        let t = truncated_add(3).unwrap();
        assert_eq!(t.table(), &[vec![1, 2, 2], vec![2, 2, 2], vec![2, 2, 2]]);
        assert!(!t.is_product(0));
        assert!(t.is_product(1));
    }

    #[test]
    fn violation_is_first_in_row_major_order() {
        // 0∘0=1, 0∘1=0, 1∘0=0, 1∘1=1 is the group of order 2 with identity 1
        assert_eq!(
            check_associativity(&[vec![1, 0], vec![0, 1]]).unwrap(),
            None
        );
        let bad = vec![vec![1, 0], vec![1, 1]];
        assert_eq!(check_associativity(&bad).unwrap(), Some((0, 0, 0)));
        assert!(matches!(
            Semigroup::new(bad),
            Err(Error::NotAssociative(0, 0, 0))
        ));
        assert_eq!(
            check_associativity(&[vec![1, 0], vec![0, 0]]).unwrap(),
            Some((0, 0, 1))
        );
    }

    #[test]
    fn malformed_tables() {
        assert!(check_associativity(&[vec![0, 1]]).is_err());
        assert!(check_associativity(&[vec![0, 2], vec![0, 0]]).is_err());
        assert!(check_associativity(&[]).is_err());
    }

    #[test]
    fn index_period_examples() {
        assert_eq!(
            cyclic(2).unwrap().index_period(1),
            IndexPeriod { m: 1, p: 2 }
        );
        assert_eq!(null(2).unwrap().index_period(1), IndexPeriod { m: 2, p: 1 });
        assert_eq!(
            left_zero(3).unwrap().index_period(2),
            IndexPeriod { m: 1, p: 1 }
        );
        assert_eq!(
            truncated_add(3).unwrap().index_period(0),
            IndexPeriod { m: 3, p: 1 }
        );
    }

    #[test]
    fn constructions_parse() {
        let p = parse_expr("product(cyclic(2), null(2))").unwrap();
        assert_eq!(p.order(), 4);
        assert_eq!(p, product(&cyclic(2).unwrap(), &null(2).unwrap()));
        let a = parse_expr("adjoin_identity(null(2))").unwrap();
        assert_eq!(a.table(), &[vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 2]]);
        assert!(parse_expr("cyclic(0)").is_err());
        assert!(parse_expr("cyclic(2").is_err());
        assert!(parse_expr("free(2)").is_err());
        assert!(parse_expr("cyclic(2) x").is_err());
    }

    #[test]
    fn json_round_trip_validates() {
        let s = cyclic(3).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<Semigroup>(&text).unwrap(), s);
        let bad = r#"{"n": 2, "table": [[1,0],[1,1]]}"#;
        assert!(serde_json::from_str::<Semigroup>(bad).is_err());
        let wrong_n = r#"{"n": 3, "table": [[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<Semigroup>(wrong_n).is_err());
    }

    #[test]
    fn canonical_form_ignores_relabelling() {
        let s = adjoin_zero(&cyclic(2).unwrap());
        let r = s.relabel(&[2, 0, 1]);
        assert_ne!(s.table(), r.table());
        assert_eq!(s.canonical_form(), r.canonical_form());
    }

    #[test]
    fn order_four_needs_the_flag() {
        assert!(matches!(
            enumerate_semigroups(4, false),
            Err(Error::EnumerationCap(4))
        ));
        assert!(enumerate_semigroups(0, false).is_err());
    }
}
