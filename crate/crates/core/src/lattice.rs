//! Finite orthomodular lattices pasted from Greechie diagrams.
//!
//! Every block of `k` atoms contributes the Boolean algebra `2^k`. Blocks
//! are glued along shared atoms (and their complements); the order is the
//! union of the block-local subset orders. After construction the tables
//! are checked against the lattice, ortholattice and orthomodular laws, so
//! a successfully built [`OmlLattice`] is always an OML.

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::greechie::GreechieDiagram;

/// Index of an element in an [`OmlLattice`].
pub type Elem = usize;

/// Upper bound on pasted element counts; construction is cubic.
pub const MAX_ELEMENTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Zero,
    One,
    Atom(usize),
    Coatom(usize),
    /// A subset of a block that is neither a singleton nor a co-singleton.
    /// Bit `i` of `mask` selects `block[i]`.
    Join { block: usize, mask: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("pasting has {0} elements (limit {MAX_ELEMENTS})")]
    TooManyElements(usize),
    #[error("atom {0} has different complements in different blocks")]
    AmbiguousComplement(char),
    #[error("elements {0} and {1} have no unique {2}")]
    NotALattice(String, String, &'static str),
    #[error("orthocomplement law fails at element {0}")]
    NotOrthocomplemented(String),
    #[error("orthomodular law fails for {0} <= {1}")]
    NotOrthomodular(String, String),
}

#[derive(Debug, Clone)]
pub struct OmlLattice {
    source: GreechieDiagram,
    elements: Vec<ElementKind>,
    /// `down[y]` holds every `x` with `x <= y`.
    down: Vec<FixedBitSet>,
    meet: Vec<u16>,
    join: Vec<u16>,
    ortho: Vec<u16>,
    arrow: Vec<u16>,
    atom_elems: Vec<Elem>,
    coatom_elems: Vec<Option<Elem>>,
}

pub const ZERO: Elem = 0;
pub const ONE: Elem = 1;

fn block_mask(block: &[usize], atom: usize) -> u64 {
    1u64 << block.iter().position(|&a| a == atom).expect("atom in block")
}

fn full_mask(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl OmlLattice {
    pub fn from_diagram(diagram: &GreechieDiagram) -> Result<Self, LatticeError> {
        let num_atoms = diagram.num_atoms();
        let blocks = diagram.blocks();

        let estimate: usize = 2 + blocks
            .iter()
            .map(|b| (1usize << b.len().min(20)).saturating_sub(2))
            .sum::<usize>();
        if blocks.iter().any(|b| b.len() > 20) || estimate > 4 * MAX_ELEMENTS {
            return Err(LatticeError::TooManyElements(estimate));
        }

        // Complement of each atom: a coatom when every block through it has
        // at least three atoms, otherwise the partner in its single 2-block.
        let mut atom_complement: Vec<ElementKind> = Vec::with_capacity(num_atoms);
        for a in 0..num_atoms {
            let containing: Vec<usize> = diagram.blocks_containing(a).collect();
            let small: Vec<usize> = containing
                .iter()
                .copied()
                .filter(|&b| blocks[b].len() == 2)
                .collect();
            let kind = match (small.len(), containing.len()) {
                (0, _) => ElementKind::Coatom(a),
                (1, 1) => {
                    let b = &blocks[small[0]];
                    ElementKind::Atom(if b[0] == a { b[1] } else { b[0] })
                }
                _ => return Err(LatticeError::AmbiguousComplement(diagram.label(a))),
            };
            atom_complement.push(kind);
        }

        let mut elements = vec![ElementKind::Zero, ElementKind::One];
        elements.extend((0..num_atoms).map(ElementKind::Atom));
        elements.extend(
            (0..num_atoms)
                .filter(|&a| atom_complement[a] == ElementKind::Coatom(a))
                .map(ElementKind::Coatom),
        );
        for (bi, block) in blocks.iter().enumerate() {
            let k = block.len() as u32;
            for mask in 1..full_mask(block.len()) {
                let c = mask.count_ones();
                if c >= 2 && c + 2 <= k {
                    elements.push(ElementKind::Join { block: bi, mask });
                }
            }
        }
        let m = elements.len();
        if m > MAX_ELEMENTS {
            return Err(LatticeError::TooManyElements(m));
        }

        let index_of = |kind: ElementKind| -> Elem {
            elements.iter().position(|&e| e == kind).expect("element present")
        };
        let mut atom_elems = Vec::with_capacity(num_atoms);
        let mut coatom_elems = vec![None; num_atoms];
        for (i, e) in elements.iter().enumerate() {
            match *e {
                ElementKind::Atom(_) => atom_elems.push(i),
                ElementKind::Coatom(a) => coatom_elems[a] = Some(i),
                _ => {}
            }
        }

        let canon = |block: usize, mask: u64| -> Elem {
            let b = &blocks[block];
            let full = full_mask(b.len());
            let ones = mask.count_ones() as usize;
            if mask == 0 {
                ZERO
            } else if mask == full {
                ONE
            } else if ones == 1 {
                atom_elems[b[mask.trailing_zeros() as usize]]
            } else if ones + 1 == b.len() {
                let missing = b[(full ^ mask).trailing_zeros() as usize];
                coatom_elems[missing].expect("coatom of atom in a block of size >= 3")
            } else {
                index_of(ElementKind::Join { block, mask })
            }
        };

        // Block-local representations: for each block the elements living in
        // it, with their subset masks.
        let mut in_block: Vec<Vec<(Elem, u64)>> = vec![Vec::new(); blocks.len()];
        for (i, e) in elements.iter().enumerate() {
            match *e {
                ElementKind::Zero | ElementKind::One => {}
                ElementKind::Atom(a) => {
                    for b in diagram.blocks_containing(a) {
                        in_block[b].push((i, block_mask(&blocks[b], a)));
                    }
                }
                ElementKind::Coatom(a) => {
                    for b in diagram.blocks_containing(a) {
                        let full = full_mask(blocks[b].len());
                        in_block[b].push((i, full ^ block_mask(&blocks[b], a)));
                    }
                }
                ElementKind::Join { block, mask } => in_block[block].push((i, mask)),
            }
        }

        let mut down = vec![FixedBitSet::with_capacity(m); m];
        for (y, row) in down.iter_mut().enumerate() {
            row.insert(ZERO);
            row.insert(y);
        }
        for x in 0..m {
            down[ONE].insert(x);
        }
        for members in &in_block {
            for &(x, mx) in members {
                for &(y, my) in members {
                    if mx & !my == 0 {
                        down[y].insert(x);
                    }
                }
            }
        }
        let up: Vec<FixedBitSet> = (0..m)
            .map(|x| {
                let mut row = FixedBitSet::with_capacity(m);
                for y in 0..m {
                    if down[y].contains(x) {
                        row.insert(y);
                    }
                }
                row
            })
            .collect();

        let describe = |x: Elem| describe_kind(diagram, elements[x]);

        let mut meet = vec![0u16; m * m];
        let mut join = vec![0u16; m * m];
        for x in 0..m {
            for y in x..m {
                let mut lower = down[x].clone();
                lower.intersect_with(&down[y]);
                let glb = lower
                    .ones()
                    .find(|&g| lower.is_subset(&down[g]))
                    .ok_or_else(|| LatticeError::NotALattice(describe(x), describe(y), "meet"))?;
                let mut upper = up[x].clone();
                upper.intersect_with(&up[y]);
                let lub = upper
                    .ones()
                    .find(|&g| upper.is_subset(&up[g]))
                    .ok_or_else(|| LatticeError::NotALattice(describe(x), describe(y), "join"))?;
                meet[x * m + y] = glb as u16;
                meet[y * m + x] = glb as u16;
                join[x * m + y] = lub as u16;
                join[y * m + x] = lub as u16;
            }
        }

        let mut ortho = vec![0u16; m];
        for (i, e) in elements.iter().enumerate() {
            let c = match *e {
                ElementKind::Zero => ONE,
                ElementKind::One => ZERO,
                ElementKind::Atom(a) => match atom_complement[a] {
                    ElementKind::Atom(p) => atom_elems[p],
                    _ => coatom_elems[a].expect("coatom exists"),
                },
                ElementKind::Coatom(a) => atom_elems[a],
                ElementKind::Join { block, mask } => canon(block, full_mask(blocks[block].len()) ^ mask),
            };
            ortho[i] = c as u16;
        }

        let mut arrow = vec![0u16; m * m];
        for x in 0..m {
            for y in 0..m {
                let xy = meet[x * m + y] as usize;
                arrow[x * m + y] = join[ortho[x] as usize * m + xy];
            }
        }

        let lattice = OmlLattice {
            source: diagram.clone(),
            elements,
            down,
            meet,
            join,
            ortho,
            arrow,
            atom_elems,
            coatom_elems,
        };
        lattice.verify_ortho_laws()?;
        Ok(lattice)
    }

    fn verify_ortho_laws(&self) -> Result<(), LatticeError> {
        let m = self.len();
        for x in 0..m {
            let xc = self.ortho(x);
            if self.ortho(xc) != x || self.meet(x, xc) != ZERO || self.join(x, xc) != ONE {
                return Err(LatticeError::NotOrthocomplemented(self.describe(x)));
            }
            for y in 0..m {
                if self.leq(x, y) && !self.leq(self.ortho(y), xc) {
                    return Err(LatticeError::NotOrthocomplemented(self.describe(x)));
                }
            }
        }
        for x in 0..m {
            let xc = self.ortho(x);
            for y in self.up_iter(x) {
                if self.join(x, self.meet(y, xc)) != y {
                    return Err(LatticeError::NotOrthomodular(self.describe(x), self.describe(y)));
                }
            }
        }
        Ok(())
    }

    fn up_iter(&self, x: Elem) -> impl Iterator<Item = Elem> + '_ {
        (0..self.len()).filter(move |&y| self.leq(x, y))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn source(&self) -> &GreechieDiagram {
        &self.source
    }

    pub fn kind(&self, x: Elem) -> ElementKind {
        self.elements[x]
    }

    pub fn elements(&self) -> &[ElementKind] {
        &self.elements
    }

    pub fn zero(&self) -> Elem {
        ZERO
    }

    pub fn one(&self) -> Elem {
        ONE
    }

    /// Element indices of the atoms, in diagram atom order.
    pub fn atoms(&self) -> &[Elem] {
        &self.atom_elems
    }

    pub fn atom(&self, atom: usize) -> Elem {
        self.atom_elems[atom]
    }

    /// Orthocomplement of the atom, which is a coatom except for atoms
    /// of a lone two-atom block.
    pub fn atom_complement(&self, atom: usize) -> Elem {
        self.ortho(self.atom_elems[atom])
    }

    pub fn coatom(&self, atom: usize) -> Option<Elem> {
        self.coatom_elems[atom]
    }

    #[inline]
    pub fn leq(&self, x: Elem, y: Elem) -> bool {
        self.down[y].contains(x)
    }

    /// `x ⊥ y`, i.e. `x <= y'`.
    #[inline]
    pub fn orthogonal(&self, x: Elem, y: Elem) -> bool {
        self.leq(x, self.ortho(y))
    }

    /// `x C y`, i.e. `x ∧ (x' ∨ y) <= y`.
    #[inline]
    pub fn commutes(&self, x: Elem, y: Elem) -> bool {
        let t = self.join(self.ortho(x), y);
        self.leq(self.meet(x, t), y)
    }

    #[inline]
    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.meet[x * self.len() + y] as Elem
    }

    #[inline]
    pub fn join(&self, x: Elem, y: Elem) -> Elem {
        self.join[x * self.len() + y] as Elem
    }

    #[inline]
    pub fn ortho(&self, x: Elem) -> Elem {
        self.ortho[x] as Elem
    }

    /// Sasaki arrow `x' ∨ (x ∧ y)`.
    #[inline]
    pub fn arrow(&self, x: Elem, y: Elem) -> Elem {
        self.arrow[x * self.len() + y] as Elem
    }

    /// Elements below `y`.
    pub fn down_set(&self, y: Elem) -> &FixedBitSet {
        &self.down[y]
    }

    /// Atom indices (diagram numbering) below `x`.
    pub fn atoms_below(&self, x: Elem) -> Vec<usize> {
        (0..self.atom_elems.len())
            .filter(|&a| self.leq(self.atom_elems[a], x))
            .collect()
    }

    /// All ordered pairs `(a, b)` with `a ≰ b`, lexicographic by index.
    pub fn nonleq_pairs(&self) -> Vec<(Elem, Elem)> {
        let m = self.len();
        (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .filter(|&(a, b)| !self.leq(a, b))
            .collect()
    }

    /// Human-readable label: atom labels, a prime for coatoms, and
    /// parenthesized label groups for other block joins.
    pub fn describe(&self, x: Elem) -> String {
        describe_kind(&self.source, self.elements[x])
    }
}

fn describe_kind(diagram: &GreechieDiagram, kind: ElementKind) -> String {
    match kind {
        ElementKind::Zero => "zero".to_string(),
        ElementKind::One => "one".to_string(),
        ElementKind::Atom(a) => diagram.label(a).to_string(),
        ElementKind::Coatom(a) => format!("{}′", diagram.label(a)),
        ElementKind::Join { block, mask } => {
            let b = diagram.block(block);
            let labels: String = (0..b.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| diagram.label(b[i]))
                .collect();
            format!("({labels})")
        }
    }
}

/// Sasaki arrow through the lattice tables.
pub fn sasaki_arrow(l: &OmlLattice, x: Elem, y: Elem) -> Elem {
    l.arrow(x, y)
}

impl fmt::Display for OmlLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} elements, {} atoms, {} blocks)",
            self.source,
            self.len(),
            self.source.num_atoms(),
            self.source.num_blocks()
        )
    }
}
