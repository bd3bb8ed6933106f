//! Central extensions of finite groups by a cyclic kernel.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::cohomology::ModCochain;
use super::table::FiniteGroupTable;

/// `ℤ_n → Ĝ → G` with `ker ρ = ⟨generator⟩ ≅ ℤ_n` and a set-section `ŝ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCentralExtension {
    name: String,
    hat: FiniteGroupTable,
    base: FiniteGroupTable,
    rho: Vec<usize>,
    section: Vec<usize>,
    modulus: usize,
    generator: usize,
}

impl FiniteCentralExtension {
    /// Checks shapes and index ranges; the algebraic laws are reported by
    /// [`FiniteCentralExtension::violations`].
    pub fn new(
        name: impl Into<String>,
        hat: FiniteGroupTable,
        base: FiniteGroupTable,
        rho: Vec<usize>,
        section: Vec<usize>,
        modulus: usize,
        generator: usize,
    ) -> Result<Self> {
        let name = name.into();
        if rho.len() != hat.order() || rho.iter().any(|&x| x >= base.order()) {
            return Err(Error::Extension(format!("{name}: ρ must send each of the {} elements of Ĝ into G", hat.order())));
        }
        if section.len() != base.order() || section.iter().any(|&x| x >= hat.order()) {
            return Err(Error::Extension(format!("{name}: ŝ must send each of the {} elements of G into Ĝ", base.order())));
        }
        if modulus == 0 || generator >= hat.order() {
            return Err(Error::Extension(format!("{name}: kernel needs n ≥ 1 and a generator in Ĝ")));
        }
        Ok(FiniteCentralExtension {
            name,
            hat,
            base,
            rho,
            section,
            modulus,
            generator,
        })
    }

    /// The split extension `G × ℤ_n` with `ŝ(g) = (g, 0)`.
    pub fn split(name: impl Into<String>, base: &FiniteGroupTable, n: usize) -> Self {
        let hat = base.product(&FiniteGroupTable::cyclic(n));
        let rho = (0..hat.order()).map(|x| x / n).collect();
        let section = (0..base.order()).map(|g| g * n).collect();
        let generator = base.identity() * n + 1 % n;
        Self::new(name, hat, base.clone(), rho, section, n, generator).expect("split extension is well formed")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn hat(&self) -> &FiniteGroupTable {
        &self.hat
    }

    pub fn base(&self) -> &FiniteGroupTable {
        &self.base
    }

    pub fn rho(&self, x: usize) -> usize {
        self.rho[x]
    }

    pub fn section(&self, g: usize) -> usize {
        self.section[g]
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn generator(&self) -> usize {
        self.generator
    }

    /// The same extension with another section.
    pub fn with_section(&self, section: Vec<usize>) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.hat.clone(),
            self.base.clone(),
            self.rho.clone(),
            section,
            self.modulus,
            self.generator,
        )
    }

    /// `k` with `x = generator^k`, if `x` is in the kernel.
    pub fn kernel_exponent(&self, x: usize) -> Option<usize> {
        let mut power = self.hat.identity();
        for k in 0..self.modulus {
            if power == x {
                return Some(k);
            }
            power = self.hat.mul(power, self.generator);
        }
        None
    }

    /// Every structural law with its first violation, `None` when it holds.
    pub fn violations(&self) -> Vec<(&'static str, Option<String>)> {
        let (h, g) = (&self.hat, &self.base);
        let nh = h.order();
        let mut out = vec![("Ĝ is a group", h.violation()), ("G is a group", g.violation())];
        let hom = (0..nh)
            .flat_map(|a| (0..nh).map(move |b| (a, b)))
            .find(|&(a, b)| self.rho[h.mul(a, b)] != g.mul(self.rho[a], self.rho[b]))
            .map(|(a, b)| format!("ρ({a}·{b}) ≠ ρ({a})ρ({b})"));
        out.push(("ρ is a homomorphism", hom));
        let onto = (0..g.order())
            .find(|x| !self.rho.contains(x))
            .map(|x| format!("{x} is not in the image of ρ"));
        out.push(("ρ is surjective", onto));
        let mut kernel = None;
        let mut power = h.identity();
        for k in 1..=self.modulus {
            power = h.mul(power, self.generator);
            if self.rho[power] != g.identity() {
                kernel = Some(format!("generator^{k} = {power} is not in ker ρ"));
                break;
            }
            if (power == h.identity()) != (k == self.modulus) {
                kernel = Some(format!("generator has order ≠ {} (generator^{k} = {power})", self.modulus));
                break;
            }
        }
        if kernel.is_none() {
            let size = (0..nh).filter(|&x| self.rho[x] == g.identity()).count();
            if size != self.modulus {
                kernel = Some(format!("|ker ρ| = {size}, expected {}", self.modulus));
            }
        }
        out.push(("ker ρ = ⟨generator⟩ ≅ ℤ_n", kernel));
        let central = (0..nh)
            .find(|&x| h.mul(x, self.generator) != h.mul(self.generator, x))
            .map(|x| format!("generator does not commute with {x}"));
        out.push(("kernel is central", central));
        let order = (nh != self.modulus * g.order()).then(|| format!("{nh} ≠ {}·{}", self.modulus, g.order()));
        out.push(("|Ĝ| = n·|G|", order));
        let sect = (0..g.order())
            .find(|&x| self.rho[self.section[x]] != x)
            .map(|x| format!("ρ(ŝ({x})) = {} ≠ {x}", self.rho[self.section[x]]));
        out.push(("ρ∘ŝ = id", sect));
        let unit = (self.section[g.identity()] != h.identity()).then(|| format!("ŝ(e) = {}", self.section[g.identity()]));
        out.push(("ŝ(e) = e", unit));
        out
    }

    pub fn first_violation(&self) -> Option<String> {
        self.violations()
            .into_iter()
            .find_map(|(law, v)| v.map(|v| format!("{law}: {v}")))
    }

    /// `c(g₁,g₂)` = exponent of `ŝ(g₁)ŝ(g₂)ŝ(g₁g₂)⁻¹` in `ℤ_n`.
    pub fn section_cocycle(&self) -> Result<ModCochain> {
        let (h, g) = (&self.hat, &self.base);
        let n = g.order();
        let mut values = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let x = h.mul(h.mul(self.section[a], self.section[b]), h.inv(self.section[g.mul(a, b)]));
                let k = self.kernel_exponent(x).ok_or_else(|| {
                    Error::Extension(format!("{}: ŝ({a})ŝ({b})ŝ({a}·{b})⁻¹ = {x} is not in the kernel", self.name))
                })?;
                values.push(k as u64);
            }
        }
        Ok(ModCochain::new(2, n, self.modulus as u64, values))
    }

    /// Parses an extension file with lines `hat <table>`, `base <table>`,
    /// `kernel <n> <generator>`, `rho <indices>` and `section <indices>`.
    /// Table paths are relative to the extension file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("extension").to_string();
        Self::parse(&name, &text, path, &dir)
    }

    pub fn parse(name: &str, text: &str, origin: &Path, dir: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.display().to_string(),
            line,
            message,
        };
        let (mut hat, mut base, mut kernel, mut rho, mut section) = (None, None, None, None, None);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            let numbers = || {
                rest.iter()
                    .map(|t| t.parse::<usize>().map_err(|_| err(i + 1, format!("bad index {t:?}"))))
                    .collect::<Result<Vec<_>>>()
            };
            match key {
                "hat" | "base" => {
                    let [file] = rest.as_slice() else {
                        return Err(err(i + 1, format!("{key} takes one table path")));
                    };
                    let table = FiniteGroupTable::load(&dir.join(PathBuf::from(file)))?;
                    if key == "hat" {
                        hat = Some(table);
                    } else {
                        base = Some(table);
                    }
                }
                "kernel" => match numbers()?.as_slice() {
                    &[n, gen] => kernel = Some((n, gen)),
                    _ => return Err(err(i + 1, "kernel takes the order and a generator".into())),
                },
                "rho" => rho = Some(numbers()?),
                "section" => section = Some(numbers()?),
                other => return Err(err(i + 1, format!("unknown key {other:?}"))),
            }
        }
        let missing = |what: &str| err(0, format!("missing {what} line"));
        let (n, gen) = kernel.ok_or_else(|| missing("kernel"))?;
        Self::new(
            name,
            hat.ok_or_else(|| missing("hat"))?,
            base.ok_or_else(|| missing("base"))?,
            rho.ok_or_else(|| missing("rho"))?,
            section.ok_or_else(|| missing("section"))?,
            n,
            gen,
        )
    }
}
