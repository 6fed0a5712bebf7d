#!/usr/bin/env python3
"""
Version management script for joyce-pde.

Usage:
    python scripts/bump_version.py [major|minor|patch] ["release note"]

Examples:
    python scripts/bump_version.py patch                      # 0.3.0 -> 0.3.1
    python scripts/bump_version.py minor "Radial mode seeds"  # 0.3.0 -> 0.4.0

Updates src/__version__.py (version, version tuple, release notes) and the
version in pyproject.toml, then commits and tags. Every exported file carries
the version, so bump before regenerating reference outputs.
"""
import re
import subprocess
import sys
from pathlib import Path

from loguru import logger

ROOT = Path(__file__).parent.parent
VERSION_FILE = ROOT / "src" / "__version__.py"
PYPROJECT = ROOT / "pyproject.toml"


def get_current_version():
    content = VERSION_FILE.read_text()
    match = re.search(r'__version__ = "(\d+)\.(\d+)\.(\d+)"', content)
    if not match:
        raise ValueError("Could not find version in __version__.py")
    return tuple(map(int, match.groups()))


def bump_version(bump_type):
    major, minor, patch = get_current_version()
    if bump_type == "major":
        return (major + 1, 0, 0)
    if bump_type == "minor":
        return (major, minor + 1, 0)
    if bump_type == "patch":
        return (major, minor, patch + 1)
    raise ValueError(f"Invalid bump type: {bump_type}. Use major, minor, or patch")


def update_version_file(version, release_note=None):
    version_str = ".".join(str(v) for v in version)
    content = VERSION_FILE.read_text()
    content = re.sub(r'__version__ = "[\d\.]+"', f'__version__ = "{version_str}"', content)
    content = re.sub(r"__version_info__ = \([\d, ]+\)", f"__version_info__ = {version}", content)
    if release_note:
        # newest entry first
        content = re.sub(r"(RELEASE_NOTES = \{\n)", f'\\1    "{version_str}": "{release_note}",\n', content)
    VERSION_FILE.write_text(content)

    manifest = PYPROJECT.read_text()
    PYPROJECT.write_text(re.sub(r'^version = "[\d\.]+"', f'version = "{version_str}"', manifest, count=1, flags=re.M))
    return version_str


def create_git_tag(version_str, message=None):
    tag_name = f"v{version_str}"
    subprocess.run(["git", "tag", "-a", tag_name, "-m", message or f"Release {version_str}"], check=True)
    logger.success(f"Created tag: {tag_name}")
    return tag_name


def main():
    if len(sys.argv) < 2:
        logger.info(__doc__)
        sys.exit(1)

    bump_type = sys.argv[1].lower()
    release_note = sys.argv[2] if len(sys.argv) > 2 else None

    old = ".".join(str(v) for v in get_current_version())
    new = update_version_file(bump_version(bump_type), release_note)
    logger.info(f"Version bumped: {old} -> {new}")

    subprocess.run(["git", "add", str(VERSION_FILE), str(PYPROJECT)], check=True)
    commit_msg = f"chore: bump version to {new}"
    if release_note:
        commit_msg += f"\n\n{release_note}"
    subprocess.run(["git", "commit", "-m", commit_msg], check=True)
    tag_name = create_git_tag(new, release_note)

    logger.success(f"Version {new} ready. Push with: git push origin main && git push origin {tag_name}")


if __name__ == "__main__":
    main()
