from .gradcheck import finite_diff_grad, relative_error
from .linalg import activate, affine_forward, glorot_init, mse
from .optim import Adam, AdamState, adam_step
from .rng import Rng
