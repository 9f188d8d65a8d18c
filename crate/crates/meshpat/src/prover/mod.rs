//! Coincidence-proving machinery: the shading lemmas, their force-based
//! strengthenings, and the recursive shading algorithm. Every `Success`
//! carries a trace that replays against the occurrence engines alone.

mod algorithm;
mod lemmas;
mod replay;

use std::fmt;
use std::sync::Arc;

use crate::force::Force;
use crate::insertion::Direction;
use crate::mesh::{MeshPattern, Square};
use crate::occurrence::Occurrence;

pub use algorithm::{search_forces, shading_algorithm, SearchBudget};
pub use lemmas::{
    lemma_tsa1, lemma_tsa2, shadeable_units, shading_lemma_anchors, shading_lemma_square,
    simultaneous_shading, Unit,
};
pub use replay::{parse_trace_text, trace_text, verify};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Success,
    Failure,
}

/// Which proving method produced an edge or verdict. The tokens double as
/// the command-line method names.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Method {
    Subset,
    Sl,
    Tsa1,
    Ssl,
    Tsa2,
    Sa,
}

impl Method {
    pub fn token(self) -> &'static str {
        match self {
            Method::Subset => "subset",
            Method::Sl => "sl",
            Method::Tsa1 => "tsa1",
            Method::Ssl => "ssl",
            Method::Tsa2 => "tsa2",
            Method::Sa => "sa",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Outcome of a proof attempt from `source` towards `target`.
///
/// On success, `coincidence` tells whether the method certifies avoidance
/// equality (both directions) or only that containment of `source` implies
/// containment of `target`. Failure proves nothing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofResult {
    pub verdict: Verdict,
    pub method: Method,
    pub source: MeshPattern,
    pub target: MeshPattern,
    pub coincidence: bool,
    pub trace: Option<Trace>,
}

impl ProofResult {
    pub fn is_success(&self) -> bool {
        self.verdict == Verdict::Success
    }

    pub(crate) fn failure(method: Method, source: MeshPattern, target: MeshPattern) -> Self {
        ProofResult {
            verdict: Verdict::Failure,
            method,
            source,
            target,
            coincidence: false,
            trace: None,
        }
    }
}

/// A directed implication between two patterns over one underlying word:
/// containment of `from` implies containment of `to`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ImplicationEdge {
    pub from: MeshPattern,
    pub to: MeshPattern,
    pub method: Method,
}

/// Replayable evidence for a successful proof.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Trace {
    Sl {
        anchor: usize,
        square: Square,
    },
    Tsa1 {
        square: Square,
        direction: Direction,
        witness: Occurrence,
    },
    Ssl {
        picks: Vec<(usize, Unit)>,
    },
    Tsa2 {
        force: Force,
        steps: Vec<Tsa2Step>,
    },
    Sa {
        force: Force,
        depth: usize,
        root: Arc<SaNode>,
    },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tsa2Step {
    pub square: Square,
    pub direction: Direction,
    pub witness: Occurrence,
}

/// One node of a shading-algorithm run: the occurrence of the underlying
/// pattern it considered and how it concluded.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SaNode {
    pub occurrence: Occurrence,
    pub kind: SaNodeKind,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SaNodeKind {
    /// The occurrence carries the source shading and is strictly stronger
    /// than the tracked occurrence, contradicting maximality.
    BaseStronger,
    /// The occurrence carries the target shading directly.
    BaseTarget,
    /// Every square standing between this occurrence and the target was
    /// certified empty through a directed insertion.
    Recurse(Vec<SaStep>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SaStep {
    pub square: Square,
    pub direction: Direction,
    pub child: Arc<SaNode>,
}
