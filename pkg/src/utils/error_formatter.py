"""
Error Formatter
Formats clear, actionable error messages for users
"""

from typing import Optional, Tuple


class ErrorFormatter:
    """Formats user-friendly error messages"""

    @staticmethod
    def format_missing_image(camera: str, path: str) -> str:
        """
        Format error message for a camera image that cannot be found

        Args:
            camera: Camera name
            path: Resolved image path

        Returns:
            Formatted error message
        """
        return f"""LightRig Error: Image for camera '{camera}' not found

The camera manifest references an image that does not exist.

Path: {path}

Suggestions:
  • Check that --input-dir points at the directory the manifest paths are relative to
  • Verify the image was rendered for every camera in the manifest

Status: I/O Error"""

    @staticmethod
    def format_resolution_mismatch(
        camera: str,
        expected: Tuple[int, int],
        actual: Tuple[int, int]
    ) -> str:
        """
        Format error message for an image whose size disagrees with the manifest

        Args:
            camera: Camera name
            expected: Size (W, H) recorded in the manifest
            actual: Size (W, H) of the image file

        Returns:
            Formatted error message
        """
        return f"""LightRig Error: Image size mismatch for camera '{camera}'

Manifest resolution: {expected[0]}x{expected[1]}
Image resolution:    {actual[0]}x{actual[1]}

Suggestions:
  • Regenerate the manifest for the rendered resolution
  • Check that the image belongs to this camera

Status: Validation Error"""

    @staticmethod
    def format_nerf_lens_error(camera: Optional[str], error: str) -> str:
        """
        Format error message for manifests that cannot feed NeRF training

        Args:
            camera: Offending camera name (if any)
            error: Conversion error message

        Returns:
            Formatted error message
        """
        where = f" (camera '{camera}')" if camera else ""
        return f"""LightRig Error: Cannot convert manifest to NeRF transforms{where}

{error}

NeRF conversion needs every camera to share one rectilinear lens and resolution.

Suggestions:
  • Reproject first, e.g. lightrig reproject --rectilinear 18,36 --scale 0.125 --png ...
  • Convert the output manifest written by the reprojection run

Status: Validation Error"""

    @staticmethod
    def format_manifest_error(path: str, error: str) -> str:
        """
        Format error message for an invalid camera manifest

        Args:
            path: Manifest path
            error: Validation error message

        Returns:
            Formatted error message
        """
        return f"""LightRig Error: Invalid camera manifest

File: {path}
Error: {error}

Suggestions:
  • Check the JSON syntax and required camera fields
  • Rotations are unit quaternions [w, x, y, z]; image paths must be relative

Status: Validation Error"""

    @staticmethod
    def format_output_path_error(path: str, manifest: str) -> str:
        """
        Format error message for output images outside the manifest directory

        Args:
            path: Output image path
            manifest: Output manifest path

        Returns:
            Formatted error message
        """
        return f"""LightRig Error: Output images must live below the output manifest

Image:    {path}
Manifest: {manifest}

Manifest image paths are relative and may not climb out of the manifest directory.

Suggestions:
  • Place --output-cfg inside --output-dir (the default)

Status: Usage Error"""

    @staticmethod
    def format_config_error(error: str) -> str:
        """
        Format error message for invalid application settings

        Args:
            error: Configuration error message

        Returns:
            Formatted error message
        """
        return f"""LightRig Error: Invalid configuration

{error}

Suggestions:
  • Check config/lightrig.yaml or the file named by --config / LIGHTRIG_CONFIG
  • Make sure every ${{VAR}} placeholder is set in the environment or .env

Status: Configuration Error"""
