# -*- coding: utf-8 -*-
#
# Copyright (C) 2024 The marsupial authors.
# License: MIT License (http://www.opensource.org/licenses/mit-license.php)

"""
Exception hierarchy shared by the planner modules.

Every error carries a message and an optional context label (a file name,
a target index or a scenario id) which is prefixed when the error is
printed.
"""


class MarsupialError(Exception):
    """
    Base class for every error raised by marsupial.

    :param error_message:
        Human readable description of the failure.
    :param context:
        Optional label identifying where the failure happened.
    """

    def __init__(self, error_message, context=None):
        self.error_message = error_message
        self.context = context
        Exception.__init__(self, error_message, context)

    def __str__(self):
        """
        Usage:

            >>> str(MarsupialError("bad value", context="scene.json"))
            'scene.json: bad value'
            >>> str(MarsupialError("bad value"))
            'bad value'
            >>> str(Unreachable("no path", target_index=1))
            'target 1: no path'
        """
        if self.context is None:
            return self.error_message
        return "%s: %s" % (self.context, self.error_message)

    def to_dict(self):
        """
        Machine-readable form written by the command line to stderr.

        :return:
            ``dict`` with the error class name, message and context.

        Usage:

            >>> sorted(SceneError("oops").to_dict().items())
            [('context', None), ('error', 'SceneError'), ('message', 'oops')]
        """
        return {
            "error": self.__class__.__name__,
            "message": self.error_message,
            "context": self.context,
        }


class SceneError(MarsupialError):
    """Invalid scene, system parameters or scene file content."""


class ConfigError(MarsupialError):
    """Malformed configuration file or unknown configuration key."""


class ShorterThanChord(MarsupialError):
    """A catenary was requested with an arc length below the anchor chord."""


class VerticalAnchors(MarsupialError):
    """A slack catenary was requested between vertically aligned anchors."""


class NoCandidates(MarsupialError):
    """No take-off candidate survived sampling for a target."""


class GenerationFailed(MarsupialError):
    """Rejection sampling of a random scenario ran out of attempts."""


class Unreachable(MarsupialError):
    """
    No feasible ground and aerial path exists for a target.

    :param target_index:
        Index of the failing target in the scene, if known.
    """

    def __init__(self, error_message, target_index=None):
        self.target_index = target_index
        context = None if target_index is None else "target %d" % target_index
        MarsupialError.__init__(self, error_message, context)
