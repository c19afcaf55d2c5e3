import logging

from fastapi import HTTPException, status

from src.api.exceptions import ConfigError, DomainError, Infeasible, ScaleError

logger = logging.getLogger(__name__)


def to_http_exception(e: Exception, action: str) -> HTTPException:
    """Map a simulation failure to the HTTP status the API reports for it."""
    if isinstance(e, (ConfigError, DomainError, ScaleError)):
        code = status.HTTP_422_UNPROCESSABLE_ENTITY
    elif isinstance(e, Infeasible):
        code = status.HTTP_409_CONFLICT
    else:
        code = status.HTTP_500_INTERNAL_SERVER_ERROR
    logger.error(f"{action} failed: {str(e)}", exc_info=True)
    return HTTPException(status_code=code, detail=f"{action} failed: {str(e)}")
