//! Finite groups as multiplication tables.

use std::path::Path;

use crate::error::{Error, Result};

/// Largest order for which associativity is checked over all triples.
pub const FULL_ASSOCIATIVITY_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroupTable {
    /// Builds a table from rows; rows must be square with entries in range,
    /// some element must act as a two-sided identity and every element needs
    /// a right inverse. Associativity and two-sided inverses are left to
    /// [`FiniteGroupTable::violation`].
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Extension("empty multiplication table".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Extension(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if let Some(j) = row.iter().position(|&x| x >= n) {
                return Err(Error::Extension(format!("entry ({i},{j}) = {} is out of range", row[j])));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| rows[e][x] == x && rows[x][e] == x))
            .ok_or_else(|| Error::Extension("no two-sided identity".into()))?;
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| rows[g][h] == identity)
                    .ok_or_else(|| Error::Extension(format!("element {g} has no right inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteGroupTable {
            table: rows,
            identity,
            inverse,
        })
    }

    /// `ℤ_n` under addition.
    pub fn cyclic(n: usize) -> Self {
        Self::from_rows((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
            .expect("cyclic table is a group")
    }

    /// Direct product, element `(a, b)` at index `a·|other| + b`.
    pub fn product(&self, other: &FiniteGroupTable) -> Self {
        let m = other.order();
        let n = self.order() * m;
        let rows = (0..n)
            .map(|x| (0..n).map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m)).collect())
            .collect();
        Self::from_rows(rows).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// First failing triple of `(ab)c = a(bc)`, if any. Orders above
    /// [`FULL_ASSOCIATIVITY_LIMIT`] are checked on generators of the form
    /// `c ∈ {0, 1, …, 7}` only.
    pub fn associativity_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.order();
        let cs = if n <= FULL_ASSOCIATIVITY_LIMIT { n } else { n.min(8) };
        for a in 0..n {
            for b in 0..n {
                for c in 0..cs {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    /// First failure of the group laws, described with its indices.
    pub fn violation(&self) -> Option<String> {
        if let Some(g) = (0..self.order()).find(|&g| self.mul(self.inv(g), g) != self.identity) {
            return Some(format!("{}·{g} ≠ e", self.inv(g)));
        }
        self.associativity_violation()
            .map(|(a, b, c)| format!("({a}·{b})·{c} ≠ {a}·({b}·{c})"))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Parses the text format: a line with `N`, then `N` lines of `N`
    /// 0-based indices.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse {
            path: origin.display().to_string(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (first, header) = lines.next().ok_or_else(|| parse_err(1, "empty file".into()))?;
        let n: usize = header
            .trim()
            .parse()
            .map_err(|_| parse_err(first + 1, format!("expected the order, found {header:?}")))?;
        let mut rows = Vec::with_capacity(n);
        for (i, line) in lines.by_ref().take(n) {
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|_| parse_err(i + 1, format!("bad index {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(parse_err(first + 1, format!("expected {n} rows, found {}", rows.len())));
        }
        if let Some((i, _)) = lines.next() {
            return Err(parse_err(i + 1, "trailing content after the table".into()));
        }
        Self::from_rows(rows).map_err(|e| parse_err(first + 1, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.order());
        for row in &self.table {
            out.push_str(&row.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_products_are_groups() {
        let z6 = FiniteGroupTable::cyclic(6);
        assert_eq!(z6.inv(2), 4);
        assert!(z6.associativity_violation().is_none());
        let p = FiniteGroupTable::cyclic(2).product(&FiniteGroupTable::cyclic(3));
        assert_eq!(p.order(), 6);
        assert!(p.is_abelian() && p.associativity_violation().is_none());
    }

    #[test]
    fn text_roundtrip_and_errors() {
        let z3 = FiniteGroupTable::cyclic(3);
        let back = FiniteGroupTable::parse(&z3.to_text(), Path::new("z3")).unwrap();
        assert_eq!(back, z3);
        let err = FiniteGroupTable::parse("2\n0 1\n1 x\n", Path::new("bad")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(FiniteGroupTable::parse("2\n0 1\n", Path::new("short")).is_err());
    }

    #[test]
    fn swapped_entry_breaks_associativity() {
        let mut rows = FiniteGroupTable::cyclic(5).rows().to_vec();
        rows[2].swap(3, 4);
        let t = FiniteGroupTable::from_rows(rows).unwrap();
        assert!(t.violation().is_some());
    }
}
