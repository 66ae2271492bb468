pub mod association;
pub mod bump;
pub mod config;
pub mod error;
pub mod fit;
pub mod genfunc;
pub mod jet;
pub mod mollifier;
pub mod nec;
pub mod quad;
pub mod run;
pub mod wormhole;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/mollifiers.md")]
    mod mollifiers {}
    #[doc = include_str!("../../../book/src/generalized_scalars.md")]
    mod generalized_scalars {}
    #[doc = include_str!("../../../book/src/association.md")]
    mod association {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/nec.md")]
    mod nec {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
