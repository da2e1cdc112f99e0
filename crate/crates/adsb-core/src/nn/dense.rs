//! Dense 204 -> 17 -> 204 autoencoder.

use alloc::vec::Vec;

use crate::event::FEATURE_COUNT;
use crate::nn::{loss_mse_backward, sigmoid, vec_scaled_add, Matrix};
use crate::rng::SplitMix64;
use crate::window::SEQUENCE_LEN;

pub const CODE_DIM: usize = FEATURE_COUNT;

/// Weights of the dense autoencoder: encoder 17x204, decoder 204x17.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseParams {
    pub w_enc: Matrix,
    pub b_enc: Vec<f64>,
    pub w_dec: Matrix,
    pub b_dec: Vec<f64>,
}

/// Gradient accumulator, same shapes as the parameters.
#[derive(Debug, Clone)]
pub struct DenseGrads {
    pub w_enc: Matrix,
    pub b_enc: Vec<f64>,
    pub w_dec: Matrix,
    pub b_dec: Vec<f64>,
}

impl DenseGrads {
    /// Same layout as [`DenseParams::to_flat`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.w_enc.data);
        out.extend_from_slice(&self.b_enc);
        out.extend_from_slice(&self.w_dec.data);
        out.extend_from_slice(&self.b_dec);
        out
    }

    pub fn zeros() -> Self {
        DenseGrads {
            w_enc: Matrix::zeros(CODE_DIM, SEQUENCE_LEN),
            b_enc: alloc::vec![0.0; CODE_DIM],
            w_dec: Matrix::zeros(SEQUENCE_LEN, CODE_DIM),
            b_dec: alloc::vec![0.0; SEQUENCE_LEN],
        }
    }
}

impl DenseParams {
    /// Xavier-uniform weights, zero biases, deterministic per seed.
    pub fn init(seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let mut w_enc = Matrix::zeros(CODE_DIM, SEQUENCE_LEN);
        w_enc.xavier_fill(SEQUENCE_LEN, CODE_DIM, &mut rng);
        let mut w_dec = Matrix::zeros(SEQUENCE_LEN, CODE_DIM);
        w_dec.xavier_fill(CODE_DIM, SEQUENCE_LEN, &mut rng);
        DenseParams {
            w_enc,
            b_enc: alloc::vec![0.0; CODE_DIM],
            w_dec,
            b_dec: alloc::vec![0.0; SEQUENCE_LEN],
        }
    }

    /// Returns (code, reconstruction).
    ///
    /// code = relu(w_enc x + b_enc); recon = sigmoid(w_dec code + b_dec).
    pub fn forward(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut pre_code = alloc::vec![0.0; CODE_DIM];
        self.w_enc.matvec(x, &mut pre_code);
        let code: Vec<f64> = pre_code
            .iter()
            .zip(self.b_enc.iter())
            .map(|(p, b)| (p + b).max(0.0))
            .collect();
        let mut pre_out = alloc::vec![0.0; SEQUENCE_LEN];
        self.w_dec.matvec(&code, &mut pre_out);
        let recon: Vec<f64> = pre_out
            .iter()
            .zip(self.b_dec.iter())
            .map(|(p, b)| sigmoid(p + b))
            .collect();
        (code, recon)
    }

    /// Accumulate the gradient of the masked MSE at `x` into `grads`.
    ///
    /// ReLU subgradient at exactly 0 is taken as 0.
    pub fn backward(&self, x: &[f64], mask: &[bool], mask_loss: bool, grads: &mut DenseGrads) -> f64 {
        self.backward_weighted(x, mask, mask_loss, 1.0, grads)
    }

    /// Like [`Self::backward`] with the loss gradient scaled by `weight`
    /// (the trainer passes the position count to descend on summed
    /// squared error).
    pub fn backward_weighted(
        &self,
        x: &[f64],
        mask: &[bool],
        mask_loss: bool,
        weight: f64,
        grads: &mut DenseGrads,
    ) -> f64 {
        let (code, recon) = self.forward(x);

        let mut d_recon = alloc::vec![0.0; SEQUENCE_LEN];
        loss_mse_backward(&recon, x, mask, mask_loss, &mut d_recon);
        for d in d_recon.iter_mut() {
            *d *= weight;
        }

        // Through the sigmoid.
        let d_pre_out: Vec<f64> = d_recon
            .iter()
            .zip(recon.iter())
            .map(|(d, r)| d * r * (1.0 - r))
            .collect();

        grads.w_dec.add_outer(&d_pre_out, &code);
        vec_scaled_add(&mut grads.b_dec, &d_pre_out, 1.0);

        let mut d_code = alloc::vec![0.0; CODE_DIM];
        self.w_dec.matvec_t_add(&d_pre_out, &mut d_code);

        // Through the ReLU; code[k] > 0 iff pre-activation > 0.
        let d_pre_code: Vec<f64> = d_code
            .iter()
            .zip(code.iter())
            .map(|(d, c)| if *c > 0.0 { *d } else { 0.0 })
            .collect();

        grads.w_enc.add_outer(&d_pre_code, x);
        vec_scaled_add(&mut grads.b_enc, &d_pre_code, 1.0);

        crate::nn::loss_mse(&recon, x, mask, mask_loss)
    }

    pub fn apply_update(&mut self, grads: &DenseGrads, scale: f64) {
        self.w_enc.scaled_add(&grads.w_enc, scale);
        vec_scaled_add(&mut self.b_enc, &grads.b_enc, scale);
        self.w_dec.scaled_add(&grads.w_dec, scale);
        vec_scaled_add(&mut self.b_dec, &grads.b_dec, scale);
    }

    /// Flatten all parameters, encoder first. Used by serialization and
    /// the finite-difference tests.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.w_enc.data);
        out.extend_from_slice(&self.b_enc);
        out.extend_from_slice(&self.w_dec.data);
        out.extend_from_slice(&self.b_dec);
        out
    }

    pub fn from_flat(flat: &[f64]) -> Option<Self> {
        let mut p = DenseParams::init(0);
        let need = p.to_flat().len();
        if flat.len() != need {
            return None;
        }
        let mut at = 0;
        let mut take = |n: usize| {
            let s = &flat[at..at + n];
            at += n;
            s.to_vec()
        };
        p.w_enc.data = take(CODE_DIM * SEQUENCE_LEN);
        p.b_enc = take(CODE_DIM);
        p.w_dec.data = take(SEQUENCE_LEN * CODE_DIM);
        p.b_dec = take(SEQUENCE_LEN);
        Some(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_params_give_flat_half_output() {
        let p = DenseParams {
            w_enc: Matrix::zeros(CODE_DIM, SEQUENCE_LEN),
            b_enc: vec![0.0; CODE_DIM],
            w_dec: Matrix::zeros(SEQUENCE_LEN, CODE_DIM),
            b_dec: vec![0.0; SEQUENCE_LEN],
        };
        let x = vec![0.3; SEQUENCE_LEN];
        let (code, recon) = p.forward(&x);
        assert!(code.iter().all(|&c| c == 0.0));
        assert!(recon.iter().all(|&r| r == 0.5));
    }

    #[test]
    fn shapes_and_determinism() {
        let a = DenseParams::init(7);
        let b = DenseParams::init(7);
        assert_eq!(a, b);
        assert_ne!(a, DenseParams::init(8));
        assert_eq!(a.w_enc.rows, 17);
        assert_eq!(a.w_enc.cols, 204);
        assert_eq!(a.w_dec.rows, 204);
        assert_eq!(a.w_dec.cols, 17);
        assert!(a.b_enc.iter().all(|&b| b == 0.0));
        assert!(a.b_dec.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn reconstruction_stays_in_open_unit_interval() {
        let p = DenseParams::init(3);
        let mut rng = SplitMix64::new(11);
        let x: Vec<f64> = (0..SEQUENCE_LEN).map(|_| rng.next_f64()).collect();
        let (code, recon) = p.forward(&x);
        assert_eq!(code.len(), 17);
        assert!(recon.iter().all(|&r| r > 0.0 && r < 1.0));
    }

    #[test]
    fn flat_round_trip() {
        let p = DenseParams::init(5);
        let q = DenseParams::from_flat(&p.to_flat()).unwrap();
        assert_eq!(p, q);
        assert!(DenseParams::from_flat(&[0.0; 3]).is_none());
    }
}
