pub mod dax;
pub mod error;
pub mod group;
pub mod pairing;
pub mod quotient;
pub mod report;
pub mod ring;
pub mod scene;
pub mod snf;
pub mod trace;
mod syntax;

pub use error::{Error, Result};
pub use group::{normalize, parse_group_spec, GroupElem, GroupSpec, SpecRef, Word};
pub use ring::RingElem;
pub use pairing::{lambda_flip, lambda_linear, lambdabar_conj_shift, PairingTable, SphereClass};
pub use dax::{dax_boundary_sphere, dax_image, dax_rebase, dax_translate, dax_u_embedded, dax_u_general, translate_class, DaxContext, Mode};
