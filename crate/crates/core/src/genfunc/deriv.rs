use std::sync::Arc;

use super::node::{constant, mk_product, mk_scale, mk_sum, Node, SqrtData, MAX_INTERNAL_DELTA};
use super::smooth::Sign;
use crate::error::{Error, Result};

/// Push one `d/dη̃` through the tree.
pub(crate) fn lie(node: &Arc<Node>) -> Result<Arc<Node>> {
    Ok(match &**node {
        Node::Constant(_) => constant(0.0),
        Node::Heaviside(Sign::Plus) => Arc::new(Node::DeltaDeriv(0)),
        Node::Heaviside(Sign::Minus) => mk_scale(-1.0, Arc::new(Node::DeltaDeriv(0))),
        Node::DeltaDeriv(k) => {
            if k + 1 > MAX_INTERNAL_DELTA {
                return Err(Error::DeltaOrderOutOfRange(k + 1));
            }
            Arc::new(Node::DeltaDeriv(k + 1))
        }
        Node::Embedded { kernel, order } => {
            if order + 1 > kernel.max_order() {
                return Err(Error::MissingDerivative {
                    available: kernel.max_order(),
                    requested: order + 1,
                });
            }
            Arc::new(Node::Embedded {
                kernel: kernel.clone(),
                order: order + 1,
            })
        }
        Node::Smooth { f, order } => {
            if order + 1 > f.order() {
                return Err(Error::MissingDerivative {
                    available: f.order(),
                    requested: order + 1,
                });
            }
            Arc::new(Node::Smooth {
                f: f.clone(),
                order: order + 1,
            })
        }
        Node::Sum(items) => mk_sum(items.iter().map(lie).collect::<Result<_>>()?),
        Node::Product(items) => {
            let mut terms = Vec::with_capacity(items.len());
            for i in 0..items.len() {
                let mut factors = items.clone();
                factors[i] = lie(&items[i])?;
                terms.push(mk_product(factors));
            }
            mk_sum(terms)
        }
        Node::Scale(c, u) => mk_scale(*c, lie(u)?),
        Node::Derivative(u) => lie(&lie(u)?)?,
        Node::Sqrt(d) => {
            let lowered = Arc::new(Node::Sqrt(SqrtData {
                inner: d.inner.clone(),
                sign: d.sign,
                window: d.window,
                power: d.power - 2,
                eps0: d.eps0,
            }));
            mk_scale(
                d.sign * d.power as f64 / 2.0,
                mk_product(vec![lie(&d.inner)?, lowered]),
            )
        }
    })
}

/// Replace every `Derivative` node by its pushed-down form.
pub(crate) fn normal_form(node: &Arc<Node>) -> Result<Arc<Node>> {
    Ok(match &**node {
        Node::Derivative(u) => lie(&normal_form(u)?)?,
        Node::Sum(items) => mk_sum(items.iter().map(normal_form).collect::<Result<_>>()?),
        Node::Product(items) => mk_product(items.iter().map(normal_form).collect::<Result<_>>()?),
        Node::Scale(c, u) => mk_scale(*c, normal_form(u)?),
        Node::Sqrt(d) => Arc::new(Node::Sqrt(SqrtData {
            inner: normal_form(&d.inner)?,
            sign: d.sign,
            window: d.window,
            power: d.power,
            eps0: d.eps0,
        })),
        _ => node.clone(),
    })
}
