//! Well partial orders, PO-dilators and their Kruskal fixed points.

pub mod dilators;
pub mod exp2;
pub mod fixpoint;
pub mod orders;
pub mod tftree;
pub mod witnesses;

pub use dilators::{
    Applied, Builtin, BuiltinKind, Dilator, ElementCode, Law, LawBudget, LawStatus, LawVerdict,
    Witness,
};
pub use exp2::{Exp2Error, Exp2Order, Exp2Term};
pub use fixpoint::{FixError, FixedPoint, Term};
pub use orders::{Code, CodedOrder, FinPoset, FinSeq, Order, OrderError};
pub use tftree::{InjectiveMap, TfError, TfOrder};
pub use witnesses::{
    amalgamation_report, coloring_order, nonunary_witness, unary_quasi_embedding,
    AmalgamationGadget, AmalgamationReport, ColoringOrder, NonUnaryWitness, UnaryEmbedding,
    UnaryImage, WitnessError,
};
