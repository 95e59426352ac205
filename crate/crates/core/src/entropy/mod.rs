mod partition;
mod sequence;
mod subcover;
mod value;

pub use partition::{partition_from_sets, Cover, Partition, MAX_ATOM_SETS};
pub use sequence::{
    compare_entropies, fekete_estimate, measure_entropy, measure_entropy_sequence, topological_entropy_sequence,
    EntropyComparison, EntropySequence, FeketeEstimate, LimitClass,
};
pub use subcover::MAX_SEARCH_MEMBERS;
pub use value::{approx_cmp, log2_approx, to_decimal, EntropyValue, DISPLAY_DIGITS};

pub(crate) use partition::{random_cover, random_partition};
