//! LSTM sequence autoencoder.
//!
//! The encoder cell consumes the 12 event blocks (skipping its state
//! update on padded blocks), its final hidden state is the code. The
//! decoder cell starts from the code and unrolls the same number of
//! steps, feeding back its own sigmoid-projected output.

use alloc::vec::Vec;

use libm::tanh;

use crate::event::FEATURE_COUNT;
use crate::nn::{loss_mse_backward, sigmoid, vec_scaled_add, Matrix};
use crate::rng::SplitMix64;

const INPUT_DIM: usize = FEATURE_COUNT;

/// One LSTM cell: standard gate formulation, weights act on the
/// concatenation [input; h_prev].
#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell {
    pub w_i: Matrix,
    pub w_f: Matrix,
    pub w_g: Matrix,
    pub w_o: Matrix,
    pub b_i: Vec<f64>,
    pub b_f: Vec<f64>,
    pub b_g: Vec<f64>,
    pub b_o: Vec<f64>,
}

impl LstmCell {
    fn zeros(hidden: usize) -> Self {
        let z = || Matrix::zeros(hidden, INPUT_DIM + hidden);
        LstmCell {
            w_i: z(),
            w_f: z(),
            w_g: z(),
            w_o: z(),
            b_i: alloc::vec![0.0; hidden],
            b_f: alloc::vec![0.0; hidden],
            b_g: alloc::vec![0.0; hidden],
            b_o: alloc::vec![0.0; hidden],
        }
    }

    fn init(hidden: usize, rng: &mut SplitMix64) -> Self {
        let mut cell = LstmCell::zeros(hidden);
        let fan_in = INPUT_DIM + hidden;
        cell.w_i.xavier_fill(fan_in, hidden, rng);
        cell.w_f.xavier_fill(fan_in, hidden, rng);
        cell.w_g.xavier_fill(fan_in, hidden, rng);
        cell.w_o.xavier_fill(fan_in, hidden, rng);
        // Forget gate opens near 1 at the start of training.
        cell.b_f.fill(1.0);
        cell
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub hidden_dim: usize,
    pub encoder: LstmCell,
    pub decoder: LstmCell,
    pub w_proj: Matrix,
    pub b_proj: Vec<f64>,
}

/// Gradients, same shapes as [`LstmParams`].
#[derive(Debug, Clone)]
pub struct LstmGrads {
    pub encoder: LstmCell,
    pub decoder: LstmCell,
    pub w_proj: Matrix,
    pub b_proj: Vec<f64>,
}

impl LstmGrads {
    /// Same layout as [`LstmParams::to_flat`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for cell in [&self.encoder, &self.decoder] {
            for (w, b) in [
                (&cell.w_i, &cell.b_i),
                (&cell.w_f, &cell.b_f),
                (&cell.w_g, &cell.b_g),
                (&cell.w_o, &cell.b_o),
            ] {
                out.extend_from_slice(&w.data);
                out.extend_from_slice(b);
            }
        }
        out.extend_from_slice(&self.w_proj.data);
        out.extend_from_slice(&self.b_proj);
        out
    }

    pub fn zeros(hidden: usize) -> Self {
        LstmGrads {
            encoder: LstmCell::zeros(hidden),
            decoder: LstmCell::zeros(hidden),
            w_proj: Matrix::zeros(INPUT_DIM, hidden),
            b_proj: alloc::vec![0.0; INPUT_DIM],
        }
    }
}

/// Per-step activations kept for backpropagation.
struct StepCache {
    z: Vec<f64>,
    c_prev: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
    c: Vec<f64>,
}

/// Forward pass result.
pub struct LstmForward {
    pub code: Vec<f64>,
    /// One reconstructed 17-vector per step.
    pub recon: Vec<Vec<f64>>,
    enc_steps: Vec<Option<StepCache>>,
    dec_steps: Vec<StepCache>,
}

impl LstmForward {
    pub fn recon_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.recon.len() * INPUT_DIM);
        for r in &self.recon {
            out.extend_from_slice(r);
        }
        out
    }
}

impl LstmParams {
    pub fn init(hidden_dim: usize, seed: u64) -> Self {
        assert!(hidden_dim >= 1);
        let mut rng = SplitMix64::new(seed);
        let encoder = LstmCell::init(hidden_dim, &mut rng);
        let decoder = LstmCell::init(hidden_dim, &mut rng);
        let mut w_proj = Matrix::zeros(INPUT_DIM, hidden_dim);
        w_proj.xavier_fill(hidden_dim, INPUT_DIM, &mut rng);
        LstmParams {
            hidden_dim,
            encoder,
            decoder,
            w_proj,
            b_proj: alloc::vec![0.0; INPUT_DIM],
        }
    }

    fn cell_step(cell: &LstmCell, input: &[f64], h_prev: &[f64], c_prev: &[f64]) -> StepCache {
        let hidden = h_prev.len();
        let mut z = Vec::with_capacity(INPUT_DIM + hidden);
        z.extend_from_slice(input);
        z.extend_from_slice(h_prev);

        let gate = |w: &Matrix, b: &[f64]| -> Vec<f64> {
            let mut pre = alloc::vec![0.0; hidden];
            w.matvec(&z, &mut pre);
            pre.iter_mut().zip(b.iter()).for_each(|(p, bv)| *p += bv);
            pre
        };
        let i: Vec<f64> = gate(&cell.w_i, &cell.b_i).iter().map(|&p| sigmoid(p)).collect();
        let f: Vec<f64> = gate(&cell.w_f, &cell.b_f).iter().map(|&p| sigmoid(p)).collect();
        let g: Vec<f64> = gate(&cell.w_g, &cell.b_g).iter().map(|&p| tanh(p)).collect();
        let o: Vec<f64> = gate(&cell.w_o, &cell.b_o).iter().map(|&p| sigmoid(p)).collect();

        let c: Vec<f64> = (0..hidden).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
        let tanh_c: Vec<f64> = c.iter().map(|&v| tanh(v)).collect();
        let h: Vec<f64> = (0..hidden).map(|k| o[k] * tanh_c[k]).collect();

        StepCache {
            z,
            c_prev: c_prev.to_vec(),
            i,
            f,
            g,
            o,
            tanh_c,
            h,
            c,
        }
    }

    /// Run encoder and decoder over `values` (a whole sequence, block
    /// length 17; any number of blocks). `mask` flags padded blocks.
    pub fn forward(&self, values: &[f64], mask: &[bool]) -> LstmForward {
        debug_assert_eq!(values.len() % INPUT_DIM, 0);
        let steps = values.len() / INPUT_DIM;
        let hidden = self.hidden_dim;

        let mut h = alloc::vec![0.0; hidden];
        let mut c = alloc::vec![0.0; hidden];
        let mut enc_steps: Vec<Option<StepCache>> = Vec::with_capacity(steps);
        for t in 0..steps {
            let present = mask[t * INPUT_DIM];
            if present {
                let cache = Self::cell_step(
                    &self.encoder,
                    &values[t * INPUT_DIM..(t + 1) * INPUT_DIM],
                    &h,
                    &c,
                );
                h = cache.h.clone();
                c = cache.c.clone();
                enc_steps.push(Some(cache));
            } else {
                enc_steps.push(None);
            }
        }
        let code = h.clone();

        let mut h = code.clone();
        let mut c = alloc::vec![0.0; hidden];
        let mut input = alloc::vec![0.0; INPUT_DIM];
        let mut dec_steps: Vec<StepCache> = Vec::with_capacity(steps);
        let mut recon: Vec<Vec<f64>> = Vec::with_capacity(steps);
        for _ in 0..steps {
            let cache = Self::cell_step(&self.decoder, &input, &h, &c);
            let mut pre = alloc::vec![0.0; INPUT_DIM];
            self.w_proj.matvec(&cache.h, &mut pre);
            let r: Vec<f64> = pre
                .iter()
                .zip(self.b_proj.iter())
                .map(|(p, b)| sigmoid(p + b))
                .collect();
            h = cache.h.clone();
            c = cache.c.clone();
            input = r.clone();
            dec_steps.push(cache);
            recon.push(r);
        }

        LstmForward {
            code,
            recon,
            enc_steps,
            dec_steps,
        }
    }

    /// Backward pass of the masked MSE for one cell step.
    ///
    /// Accumulates gate gradients and returns (d_input, d_h_prev, d_c_prev).
    fn cell_backward(
        cell: &LstmCell,
        grads: &mut LstmCell,
        cache: &StepCache,
        dh: &[f64],
        dc_in: &[f64],
    ) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let hidden = dh.len();
        let mut dc = alloc::vec![0.0; hidden];
        let mut d_o = alloc::vec![0.0; hidden];
        for k in 0..hidden {
            d_o[k] = dh[k] * cache.tanh_c[k];
            dc[k] = dc_in[k] + dh[k] * cache.o[k] * (1.0 - cache.tanh_c[k] * cache.tanh_c[k]);
        }
        let mut d_pre_i = alloc::vec![0.0; hidden];
        let mut d_pre_f = alloc::vec![0.0; hidden];
        let mut d_pre_g = alloc::vec![0.0; hidden];
        let mut d_pre_o = alloc::vec![0.0; hidden];
        let mut d_c_prev = alloc::vec![0.0; hidden];
        for k in 0..hidden {
            let (i, f, g, o) = (cache.i[k], cache.f[k], cache.g[k], cache.o[k]);
            d_pre_i[k] = dc[k] * g * i * (1.0 - i);
            d_pre_f[k] = dc[k] * cache.c_prev[k] * f * (1.0 - f);
            d_pre_g[k] = dc[k] * i * (1.0 - g * g);
            d_pre_o[k] = d_o[k] * o * (1.0 - o);
            d_c_prev[k] = dc[k] * f;
        }

        grads.w_i.add_outer(&d_pre_i, &cache.z);
        grads.w_f.add_outer(&d_pre_f, &cache.z);
        grads.w_g.add_outer(&d_pre_g, &cache.z);
        grads.w_o.add_outer(&d_pre_o, &cache.z);
        vec_scaled_add(&mut grads.b_i, &d_pre_i, 1.0);
        vec_scaled_add(&mut grads.b_f, &d_pre_f, 1.0);
        vec_scaled_add(&mut grads.b_g, &d_pre_g, 1.0);
        vec_scaled_add(&mut grads.b_o, &d_pre_o, 1.0);

        let mut dz = alloc::vec![0.0; INPUT_DIM + hidden];
        cell.w_i.matvec_t_add(&d_pre_i, &mut dz);
        cell.w_f.matvec_t_add(&d_pre_f, &mut dz);
        cell.w_g.matvec_t_add(&d_pre_g, &mut dz);
        cell.w_o.matvec_t_add(&d_pre_o, &mut dz);

        let d_input = dz[..INPUT_DIM].to_vec();
        let d_h_prev = dz[INPUT_DIM..].to_vec();
        (d_input, d_h_prev, d_c_prev)
    }

    /// Accumulate the gradient of the masked MSE at one sequence.
    pub fn backward(
        &self,
        values: &[f64],
        mask: &[bool],
        mask_loss: bool,
        grads: &mut LstmGrads,
    ) -> f64 {
        self.backward_weighted(values, mask, mask_loss, 1.0, grads)
    }

    /// Like [`Self::backward`] with the loss gradient scaled by `weight`.
    pub fn backward_weighted(
        &self,
        values: &[f64],
        mask: &[bool],
        mask_loss: bool,
        weight: f64,
        grads: &mut LstmGrads,
    ) -> f64 {
        let fwd = self.forward(values, mask);
        let recon = fwd.recon_flat();
        let steps = fwd.dec_steps.len();
        let hidden = self.hidden_dim;

        let mut d_recon = alloc::vec![0.0; recon.len()];
        loss_mse_backward(&recon, values, mask, mask_loss, &mut d_recon);
        for d in d_recon.iter_mut() {
            *d *= weight;
        }

        // Decoder BPTT: the projected output feeds both the loss and the
        // next step's input.
        let mut dh_next = alloc::vec![0.0; hidden];
        let mut dc_next = alloc::vec![0.0; hidden];
        let mut d_input_next: Vec<f64> = alloc::vec![0.0; INPUT_DIM];
        let mut d_code = alloc::vec![0.0; hidden];
        for t in (0..steps).rev() {
            let cache = &fwd.dec_steps[t];
            let r = &fwd.recon[t];
            let mut d_r = d_recon[t * INPUT_DIM..(t + 1) * INPUT_DIM].to_vec();
            if t + 1 < steps {
                vec_scaled_add(&mut d_r, &d_input_next, 1.0);
            }
            let d_pre_proj: Vec<f64> = d_r
                .iter()
                .zip(r.iter())
                .map(|(d, rv)| d * rv * (1.0 - rv))
                .collect();
            grads.w_proj.add_outer(&d_pre_proj, &cache.h);
            vec_scaled_add(&mut grads.b_proj, &d_pre_proj, 1.0);

            let mut dh = dh_next.clone();
            self.w_proj.matvec_t_add(&d_pre_proj, &mut dh);

            let (d_in, d_h_prev, d_c_prev) =
                Self::cell_backward(&self.decoder, &mut grads.decoder, cache, &dh, &dc_next);
            d_input_next = d_in;
            dh_next = d_h_prev;
            dc_next = d_c_prev;
            if t == 0 {
                // h0 of the decoder is the code; c0 is a constant zero
                // and the first input is a constant zero vector.
                d_code = dh_next.clone();
            }
        }

        // Encoder BPTT; skipped steps pass state gradients through.
        let mut dh = d_code;
        let mut dc = alloc::vec![0.0; hidden];
        for t in (0..steps).rev() {
            if let Some(cache) = &fwd.enc_steps[t] {
                let (_d_in, d_h_prev, d_c_prev) =
                    Self::cell_backward(&self.encoder, &mut grads.encoder, cache, &dh, &dc);
                dh = d_h_prev;
                dc = d_c_prev;
            }
        }

        crate::nn::loss_mse(&recon, values, mask, mask_loss)
    }

    pub fn apply_update(&mut self, grads: &LstmGrads, scale: f64) {
        let cells = [
            (&mut self.encoder, &grads.encoder),
            (&mut self.decoder, &grads.decoder),
        ];
        for (cell, g) in cells {
            cell.w_i.scaled_add(&g.w_i, scale);
            cell.w_f.scaled_add(&g.w_f, scale);
            cell.w_g.scaled_add(&g.w_g, scale);
            cell.w_o.scaled_add(&g.w_o, scale);
            vec_scaled_add(&mut cell.b_i, &g.b_i, scale);
            vec_scaled_add(&mut cell.b_f, &g.b_f, scale);
            vec_scaled_add(&mut cell.b_g, &g.b_g, scale);
            vec_scaled_add(&mut cell.b_o, &g.b_o, scale);
        }
        self.w_proj.scaled_add(&grads.w_proj, scale);
        vec_scaled_add(&mut self.b_proj, &grads.b_proj, scale);
    }

    /// Flatten all parameters: encoder gates (i, f, g, o: weights then
    /// bias), decoder likewise, then the projection.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for cell in [&self.encoder, &self.decoder] {
            for (w, b) in [
                (&cell.w_i, &cell.b_i),
                (&cell.w_f, &cell.b_f),
                (&cell.w_g, &cell.b_g),
                (&cell.w_o, &cell.b_o),
            ] {
                out.extend_from_slice(&w.data);
                out.extend_from_slice(b);
            }
        }
        out.extend_from_slice(&self.w_proj.data);
        out.extend_from_slice(&self.b_proj);
        out
    }

    pub fn from_flat(hidden_dim: usize, flat: &[f64]) -> Option<Self> {
        let mut p = LstmParams {
            hidden_dim,
            encoder: LstmCell::zeros(hidden_dim),
            decoder: LstmCell::zeros(hidden_dim),
            w_proj: Matrix::zeros(INPUT_DIM, hidden_dim),
            b_proj: alloc::vec![0.0; INPUT_DIM],
        };
        if flat.len() != p.to_flat().len() {
            return None;
        }
        let mut at = 0;
        let mut take = |n: usize| {
            let s = flat[at..at + n].to_vec();
            at += n;
            s
        };
        let wlen = hidden_dim * (INPUT_DIM + hidden_dim);
        for cell in [&mut p.encoder, &mut p.decoder] {
            cell.w_i.data = take(wlen);
            cell.b_i = take(hidden_dim);
            cell.w_f.data = take(wlen);
            cell.b_f = take(hidden_dim);
            cell.w_g.data = take(wlen);
            cell.b_g = take(hidden_dim);
            cell.w_o.data = take(wlen);
            cell.b_o = take(hidden_dim);
        }
        p.w_proj.data = take(INPUT_DIM * hidden_dim);
        p.b_proj = take(INPUT_DIM);
        Some(p)
    }
}
