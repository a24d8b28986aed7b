from .filters import CANONICAL_SCALES, DegradeSpec, add_noise, degrade_pipeline, gaussian_blur, gaussian_kernel
from .font import FontSpec, PageLayout, glyph_bank, layout_lines, page_layout, render_text_page, scaled_glyph
from .image import Image, load_image, luma, quantize, read_pgm, save_image, write_pgm
from .resample import KERNELS, cubic, resample, resize, resize_array

__all__ = [
    "CANONICAL_SCALES",
    "DegradeSpec",
    "FontSpec",
    "Image",
    "KERNELS",
    "PageLayout",
    "add_noise",
    "cubic",
    "degrade_pipeline",
    "gaussian_blur",
    "gaussian_kernel",
    "glyph_bank",
    "layout_lines",
    "load_image",
    "luma",
    "page_layout",
    "quantize",
    "read_pgm",
    "render_text_page",
    "resample",
    "resize",
    "resize_array",
    "save_image",
    "scaled_glyph",
    "write_pgm",
]
