//! The affine algebra of type A_n^(1) as Laurent-polynomial matrices.

mod element;
mod gradation;
mod matrix;

pub use element::{
    ad_word, ad_word_f, bracket, chevalley, e, f, h, invariant_form, matrix_unit, Generator, LoopElement,
};
pub use gradation::GradationSpec;
pub use matrix::{Laurent, Mat};
