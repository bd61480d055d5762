//! Finite abelian groups presented as products of cyclic groups.
//!
//! A group is kept in its user-given product form `Z_{m1} x ... x Z_{mk}`;
//! no invariant-factor normalization is applied, so two presentations of
//! isomorphic groups are distinct configurations. Elements are residue
//! tuples and the enumeration order is lexicographic on the tuples. That
//! order fixes the coordinate layout of every table and polytope built
//! downstream, so it must never change.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A product of cyclic groups `Z_{m1} x ... x Z_{mk}` with every `mi >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u32>,
}

/// An element of a [`FiniteAbelianGroup`], stored as reduced residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    residues: Vec<u32>,
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<u32>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::parse("group needs at least one cyclic factor"));
        }
        if let Some(&m) = moduli.iter().find(|&&m| m < 2) {
            return Err(Error::parse(format!("cyclic factor order {m} must be >= 2")));
        }
        moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(u64::from(m)))
            .ok_or_else(|| Error::budget("group order overflows u64"))?;
        Ok(Self { moduli })
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    /// Number of cyclic factors.
    pub fn num_factors(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().map(|&m| u64::from(m)).product()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.moduli.len()],
        }
    }

    /// Checks that `g` has the right arity and reduced residues.
    pub fn validate(&self, g: &GroupElement) -> Result<()> {
        if g.residues.len() != self.moduli.len() {
            return Err(Error::Incompatible(format!(
                "element {} has {} residues, group {} has {} factors",
                g,
                g.residues.len(),
                self,
                self.moduli.len()
            )));
        }
        for (&r, &m) in g.residues.iter().zip(&self.moduli) {
            if r >= m {
                return Err(Error::Incompatible(format!(
                    "residue {r} not reduced modulo {m} in {g}"
                )));
            }
        }
        Ok(())
    }

    /// Componentwise sum modulo the factor orders.
    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.validate(a)?;
        self.validate(b)?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| (x + y) % m)
            .collect();
        Ok(GroupElement { residues })
    }

    /// Sum of an arbitrary collection of elements; empty sums give the identity.
    pub fn sum<'a, I>(&self, elements: I) -> Result<GroupElement>
    where
        I: IntoIterator<Item = &'a GroupElement>,
    {
        let mut acc = self.identity();
        for g in elements {
            acc = self.add(&acc, g)?;
        }
        Ok(acc)
    }

    /// All elements in lexicographic residue order; position 0 is the identity.
    pub fn enumerate(&self) -> Vec<GroupElement> {
        (0..self.order())
            .map(|i| self.element_at(i).expect("index in range"))
            .collect()
    }

    /// The element at `index` in the lexicographic enumeration.
    pub fn element_at(&self, index: u64) -> Result<GroupElement> {
        if index >= self.order() {
            return Err(Error::OutOfRange(format!(
                "element index {index} out of range for {self} of order {}",
                self.order()
            )));
        }
        let mut residues = vec![0u32; self.moduli.len()];
        let mut rest = index;
        for (slot, &m) in residues.iter_mut().zip(&self.moduli).rev() {
            *slot = (rest % u64::from(m)) as u32;
            rest /= u64::from(m);
        }
        Ok(GroupElement { residues })
    }

    /// Position of `g` in the lexicographic enumeration.
    pub fn index_of(&self, g: &GroupElement) -> Result<u64> {
        self.validate(g)?;
        let mut index = 0u64;
        for (&r, &m) in g.residues.iter().zip(&self.moduli) {
            index = index * u64::from(m) + u64::from(r);
        }
        Ok(index)
    }

    /// All automorphisms of the group, as permutations of element indices.
    ///
    /// An automorphism is determined by the images of the canonical factor
    /// generators; candidates whose image orders do not divide the factor
    /// orders, or which fail to be bijections, are discarded. Only intended
    /// for small groups (the candidate space is `order^k`).
    pub fn automorphisms(&self) -> Result<Vec<Vec<u64>>> {
        let order = self.order();
        let k = self.moduli.len();
        let candidates = order.checked_pow(k as u32).filter(|&c| c <= 1_000_000);
        if candidates.is_none() {
            return Err(Error::budget(format!(
                "automorphism enumeration not supported for {self} (candidate space too large)"
            )));
        }
        let elements = self.enumerate();
        let mut result = Vec::new();
        let mut images = vec![0u64; k];
        self.automorphisms_rec(0, &mut images, &elements, &mut result)?;
        Ok(result)
    }

    fn automorphisms_rec(
        &self,
        factor: usize,
        images: &mut Vec<u64>,
        elements: &[GroupElement],
        out: &mut Vec<Vec<u64>>,
    ) -> Result<()> {
        let k = self.moduli.len();
        if factor == k {
            // Build the full map from generator images and keep it if bijective.
            let order = self.order() as usize;
            let mut perm = vec![0u64; order];
            let mut seen = vec![false; order];
            for (idx, g) in elements.iter().enumerate() {
                let mut image = self.identity();
                for (f, &img_idx) in images.iter().enumerate() {
                    let img = &elements[img_idx as usize];
                    for _ in 0..g.residues[f] {
                        image = self.add(&image, img)?;
                    }
                }
                let image_idx = self.index_of(&image)? as usize;
                if seen[image_idx] {
                    return Ok(());
                }
                seen[image_idx] = true;
                perm[idx] = image_idx as u64;
            }
            out.push(perm);
            return Ok(());
        }
        let m = u64::from(self.moduli[factor]);
        'candidate: for idx in 0..self.order() {
            // The image of a generator of Z_m must have order dividing m.
            let g = &elements[idx as usize];
            for (&r, &mj) in g.residues.iter().zip(&self.moduli) {
                if (m * u64::from(r)) % u64::from(mj) != 0 {
                    continue 'candidate;
                }
            }
            images[factor] = idx;
            self.automorphisms_rec(factor + 1, images, elements, out)?;
        }
        Ok(())
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z{m}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    /// Parses `"Z2xZ2"`, `"z3"`, `"Z2XZ4"` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let mut moduli = Vec::new();
        for part in s.split(['x', 'X']) {
            let part = part.trim();
            let rest = part
                .strip_prefix('Z')
                .or_else(|| part.strip_prefix('z'))
                .ok_or_else(|| Error::parse(format!("bad group factor {part:?} in {s:?}")))?;
            let m: u32 = rest
                .parse()
                .map_err(|_| Error::parse(format!("bad cyclic order {rest:?} in {s:?}")))?;
            moduli.push(m);
        }
        FiniteAbelianGroup::new(moduli)
    }
}

impl GroupElement {
    /// Builds an element from residues, validating against the group.
    pub fn new(residues: Vec<u32>, group: &FiniteAbelianGroup) -> Result<Self> {
        let g = GroupElement { residues };
        group.validate(&g)?;
        Ok(g)
    }

    pub fn residues(&self) -> &[u32] {
        &self.residues
    }

    /// Parses `"(1,0)"` against the group.
    pub fn parse(s: &str, group: &FiniteAbelianGroup) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::parse(format!("element {s:?} must be parenthesized")))?;
        let residues = inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::parse(format!("bad residue {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        GroupElement::new(residues, group)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}
