# Coordinate/target datasets: images, videos, SDF point clouds, procedural assets
from .coords import CoordBatch, cube_centers, cube_grid, pixel_centers, pixel_grid, to_index, video_grid
from .images import (
    ImageDataset, image_from_values, image_size, load_image, quantize, sample_image, save_grayscale, save_image,
)
from .video import VideoDataset, frame_paths, load_video, sample_video, save_video
from .sdf import (
    NOISE_SCALES, SdfDataset, build_sdf_dataset, knn, load_point_cloud, normalize_cloud,
    sample_sdf, save_point_cloud, sdf_from_cloud, sphere_sdf,
)
from .procedural import fibonacci_sphere, moving_gradient_video, siemens_star, synthetic_image, torus_cloud, torus_sdf

__all__ = [
    "CoordBatch", "cube_centers", "cube_grid", "pixel_centers", "pixel_grid", "to_index", "video_grid",
    "ImageDataset", "image_from_values", "image_size", "load_image", "quantize", "sample_image", "save_grayscale", "save_image",
    "VideoDataset", "frame_paths", "load_video", "sample_video", "save_video",
    "NOISE_SCALES", "SdfDataset", "build_sdf_dataset", "knn", "load_point_cloud", "normalize_cloud",
    "sample_sdf", "save_point_cloud", "sdf_from_cloud", "sphere_sdf",
    "fibonacci_sphere", "moving_gradient_video", "siemens_star", "synthetic_image", "torus_cloud", "torus_sdf",
]
