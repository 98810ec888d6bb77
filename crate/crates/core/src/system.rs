//! Bundles the structures derived from one dimension and arithmetic mode.

use crate::error::Result;
use crate::galois::{ArithmeticContext, ExtensionContext, Mode};
use crate::mub::MubFamily;
use crate::pauli::PhaseSystem;

#[derive(Debug, Clone)]
pub struct QuditSystem {
    pub ctx: ArithmeticContext,
    /// Present in galois mode.
    pub ext: Option<ExtensionContext>,
    pub phases: PhaseSystem,
    pub family: MubFamily,
}

impl QuditSystem {
    pub fn new(mode: Mode, dim: usize) -> Result<Self> {
        Self::from_context(ArithmeticContext::for_dimension(mode, dim)?)
    }

    pub fn from_context(ctx: ArithmeticContext) -> Result<Self> {
        let ext = match ctx.mode() {
            Mode::Galois => Some(ExtensionContext::build(&ctx)?),
            Mode::Modular => None,
        };
        let phases = PhaseSystem::build(&ctx)?;
        let family = MubFamily::build(&ctx, &phases);
        Ok(Self {
            ctx,
            ext,
            phases,
            family,
        })
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn mode(&self) -> Mode {
        self.ctx.mode()
    }
}
