//! Tree-pair diagrams for Thompson's groups F, T and V, an exact Cayley-graph
//! oracle, and ball-avoiding witness paths with checkable certificates.

pub mod certificate;
pub mod element;
pub mod generators;
pub mod io;
pub mod live;
pub mod oracle;
pub mod synth;
pub mod tree;
pub mod witness;
pub mod word;

pub use element::{BranchPair, Class, DiagramError, Element, ElementKey, TreeDiagram};
pub use generators::{eval_word, standard_generator, x_n, Alphabet, Generator, GroupWord, Letter, Step};
pub use certificate::{verify, PathCertificate, VerificationReport, VerifyMode};
pub use tree::{BinaryTree, TreeError};
pub use witness::{connect, witness, WitnessConstants};
pub use word::BinaryWord;
