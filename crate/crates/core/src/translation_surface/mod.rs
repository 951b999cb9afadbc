//! Translation surfaces given by glued polygons, their horizontal
//! foliation, first-return maps to an edge, and inadmissible loops.

mod cylinder;
mod document;
mod flow;
mod loops;
mod surface;

pub use cylinder::{is_leaf_word, realizing_set, EdgeSpan};
pub use document::{eval_expr, genus_two, sheared_torus, square_annulus, SurfaceDocument};
pub use flow::{
    cut_points, find_non_saddle_point, first_return, is_cylinder_decomposition, return_partition,
    saddle_connections, split_at, trace_separatrix, CutPoint, Ending, FlowPiece, Interval, NonSaddlePoint, Orbit,
    ReturnMap, ReturnPartition, SaddleConnection, Trace, Transversal, MAX_STEPS_PER_RETURN,
};
pub use loops::{
    build_inadmissible_loop, check_level_set_argument, inadmissible_loop, loop_constant, synthesize_exotic,
    LoopCertificate, Side, SurfaceExoticPrefix, SurfacePiece, DEFAULT_RETURN_BUDGET,
};
pub use surface::{Dir, Edge, EdgeId, Position, Separatrix, Step, TranslationSurface};
