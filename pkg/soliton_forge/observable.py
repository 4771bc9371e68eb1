"""Class hierarchy for checks that observe a profile under test."""

import abc
import logging
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Any, List

from pydantic import BaseModel

from soliton_forge.common import ForgeError, first_occurrence

logger = logging.getLogger(__name__)


class ObservableData(BaseModel):
    """A data item with the observers registered against it."""

    id: str
    payload: Any
    """The data under test."""
    observers: List[Any] = []
    """Registered observers, notified in this order."""

    def __init__(self, payload: Any, _id: str = None, observers: list = None, **data) -> None:
        """Init data with pydantic, observers locally."""
        super().__init__(id=_id or str(uuid.uuid4()), payload=payload, observers=observers or [], **data)

    def register_observer(self, observer) -> None:
        """Add observer to our list."""
        self.observers.append(observer)

    def notify_observers(self, *args, workers: int = 1, **kwargs) -> list:
        """Tell observers to process us, results in registration order.

        With more than one worker the observers run on a thread pool.
        """
        results = []
        try:
            if workers <= 1 or len(self.observers) <= 1:
                for observer in self.observers:
                    results.append(observer.notify(self, *args, **kwargs))
            else:
                with ThreadPoolExecutor(max_workers=workers) as executor:
                    futures = [executor.submit(observer.notify, self, *args, **kwargs) for observer in self.observers]
                    for future in futures:
                        results.append(future.result())
        except ForgeError as exc:
            exc.results = results
            raise
        return results

    def assert_observers(self) -> 'ObservableData':
        """Warn when nobody is listening, chainable."""
        if len(self.observers) == 0:
            if first_occurrence(f"{self.id} missing observers"):
                logger.warning(f"{self.id} missing observers")
        return self


class Context(BaseModel):
    """Transient data for command(s)."""

    obj: dict = {}


class Observer(BaseModel, abc.ABC):
    """Event sink."""

    id: str

    def __init__(self, observable: ObservableData = None, _id: str = None, **data) -> None:
        """Init id with pydantic, dispatch registration."""
        if 'id' in data:
            _id = data.pop('id')
        super().__init__(id=_id or type(self).__name__, **data)
        if observable and not isinstance(observable, (ObservableData, list)):
            raise TypeError(f"{type(observable)} is not Observable, please wrap in ObservableData.")
        if observable:
            self.observe(observable)

    def observe(self, observable) -> Any:
        """Register self with data if interested."""
        if observable:
            if not isinstance(observable, list):
                observable = [observable]
            for observable_ in observable:
                if self.interested(observable_):
                    observable_.register_observer(self)
        return observable

    @abc.abstractmethod
    def interested(self, observable: ObservableData) -> bool:
        """Get notified? Please override this method."""

    @abc.abstractmethod
    def notify(self, observable: ObservableData, context: Context = None, *args, **kwargs) -> Any:
        """Process data. Please override this method."""


class Command(Observer, abc.ABC):
    """Process a data item with a context."""
