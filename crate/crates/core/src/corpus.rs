//! Built-in lattices with their known properties.

use thiserror::Error;

use crate::greechie::parse_diagram;
use crate::lattice::OmlLattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("no corpus entry named {0:?}")]
    UnknownCorpusName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoFact {
    /// n-Go fails first at this n.
    FirstFail(usize),
    /// Every n-Go holds.
    AllPass,
}

/// Facts recorded for an entry; `None` means not recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KnownFacts {
    pub go: Option<GoFact>,
    pub e3: Option<bool>,
    pub e4: Option<bool>,
    pub admits_state: Option<bool>,
    pub strong: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub notation: &'static str,
    pub atoms: usize,
    pub blocks: usize,
    pub facts: KnownFacts,
    /// Where each fact comes from.
    pub provenance: &'static [&'static str],
}

impl CorpusEntry {
    pub fn lattice(&self) -> OmlLattice {
        let d = parse_diagram(self.notation).expect("corpus notation parses");
        OmlLattice::from_diagram(&d).expect("corpus lattice builds")
    }
}

const NONE: KnownFacts = KnownFacts {
    go: None,
    e3: None,
    e4: None,
    admits_state: None,
    strong: None,
};

const fn go_family(first_fail: usize, e3: bool) -> KnownFacts {
    KnownFacts {
        go: Some(GoFact::FirstFail(first_fail)),
        e3: Some(e3),
        e4: Some(true),
        ..NONE
    }
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry {
        name: "peterson",
        notation: "123,345,567,789,9AB,BC1,2E8,4FA,6DC,DEF.",
        atoms: 15,
        blocks: 10,
        facts: KnownFacts {
            go: Some(GoFact::FirstFail(4)),
            admits_state: Some(true),
            strong: Some(false),
            ..NONE
        },
        provenance: &[
            "published: 4-Go fails; no strong set of states (min m(7') = 1 given m(1) = 1)",
            "derived: 3-Go holds; a state exists",
        ],
    },
    CorpusEntry {
        name: "23-16-p7go-f8go-a",
        notation: "123,345,567,789,9AB,BCD,DEF,FGH,HI1,2NE,4JD,6KC,IJ8,GL9,NMA,2LK.",
        atoms: 23,
        blocks: 16,
        facts: go_family(8, true),
        provenance: &["published: passes 7-Go, violates 8-Go; satisfies E3 and E4"],
    },
    CorpusEntry {
        name: "26-18-p8go-f9go-a",
        notation: "123,345,567,789,9AB,BCD,DEF,FGH,HIJ,JKL,LMN,NO1,KP8,4PG,JQA,OE6,KD2,MC5.",
        atoms: 26,
        blocks: 18,
        facts: go_family(9, true),
        provenance: &["published: passes 8-Go, violates 9-Go; satisfies E3 and E4"],
    },
    CorpusEntry {
        name: "26-18-p9go-f10go-a",
        notation: "123,345,567,789,9AB,BCD,DEF,FGH,HIJ,JKL,LMN,NO1,KQ8,4QE,1PA,6PF,O8G,2KC.",
        atoms: 26,
        blocks: 18,
        facts: go_family(10, true),
        provenance: &["published: passes 9-Go, violates 10-Go; satisfies E3 and E4"],
    },
    CorpusEntry {
        name: "26-18-p9go-f10go-b",
        notation: "123,345,567,789,9AB,BCD,DEF,FGH,HIJ,JKL,LMN,NO1,2PG,IQC,7QP,HO8,K2B,M4A.",
        atoms: 26,
        blocks: 18,
        facts: go_family(10, false),
        provenance: &["published: passes 9-Go, violates 10-Go; violates E3, satisfies E4"],
    },
    CorpusEntry {
        name: "28-20-p10go-f11go-a",
        notation: "123,345,567,789,9AB,BCD,DEF,FGH,HIJ,JKL,LMN,NO1,MGA,IOB,L4E,KP6,IS5,2QA,PRC,QSR.",
        atoms: 28,
        blocks: 20,
        facts: go_family(11, false),
        provenance: &["published: passes 10-Go, violates 11-Go; violates E3, satisfies E4"],
    },
    CorpusEntry {
        name: "28-20-p11go-f12go-a",
        notation: "123,345,567,789,9AB,BCD,DEF,FGH,HIJ,JKL,LMN,NO1,CO6,I2B,L4A,KSE,MPQ,QRC,2PS,7PG.",
        atoms: 28,
        blocks: 20,
        facts: go_family(12, true),
        provenance: &["published: passes 11-Go, violates 12-Go; satisfies E3 and E4"],
    },
    CorpusEntry {
        name: "mayet-30-19",
        notation: "123,456,789,ABC,DEF,GHI,JKL,MNO,PQR,STU,147S,ADGT,JMPU,3CL,6FO,9IR,2EQ,5HK,8BN.",
        atoms: 30,
        blocks: 19,
        facts: KnownFacts {
            go: Some(GoFact::AllPass),
            e3: Some(true),
            e4: Some(true),
            admits_state: Some(false),
            strong: Some(false),
        },
        provenance: &[
            "published: admits no state; satisfies E3, E4 and every n-Go",
            "derived: stateless, hence not strong",
        ],
    },
];

pub fn corpus_get(name: &str) -> Result<&'static CorpusEntry, CorpusError> {
    CORPUS
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CorpusError::UnknownCorpusName(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_build() {
        for e in CORPUS {
            let l = e.lattice();
            assert_eq!(l.source().num_atoms(), e.atoms, "{}", e.name);
            assert_eq!(l.source().num_blocks(), e.blocks, "{}", e.name);
            assert_eq!(l.source().serialize(), e.notation, "{}", e.name);
        }
        assert_eq!(corpus_get("mayet-30-19").unwrap().lattice().len(), 80);
    }

    #[test]
    fn lookup() {
        assert!(corpus_get("peterson").unwrap().notation.starts_with("123,345"));
        assert!(corpus_get("26-18-p8go-f9go-a").unwrap().notation.ends_with("MC5."));
        assert_eq!(
            corpus_get("nope"),
            Err(CorpusError::UnknownCorpusName("nope".into()))
        );
    }
}
