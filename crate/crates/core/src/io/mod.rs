//! Instance files, seeded generators and SVG rendering.

pub mod format;
pub mod gen;
pub mod svg;

pub use format::{parse_instance, write_instance, InstanceFile, InstanceMeta};
pub use gen::{gen_strings, gen_bundle, gen_chain, gen_random_planar, gen_random_strip, GeneratorKind};
pub use svg::render_svg;
