mod counting;
mod shift_measure;
mod spec;
mod verify;

pub use counting::{CountingMeasure, LabelSet, MAX_BRUTE_FORCE, MAX_GROUND};
pub use shift_measure::{BernoulliMeasure, HaarMeasure, MeasureContext, MeasureKind};
pub use spec::{AnyMeasure, MeasureSpec};
pub use verify::{verify_measure_axioms, MAX_VERIFY_DEPTH};
