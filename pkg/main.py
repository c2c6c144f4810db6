#!/usr/bin/env python3
"""
Electronic Speed Bump - симулятор электронного «лежачего полицейского».

RSU у опасного участка передаёт маяки на 2.4 ГГц, бортовой блок (IVU)
по мощности принятого сигнала определяет расстояние и плавно снижает
скорость автомобиля до заданной в зоне.

Режимы работы:
- Командный режим (подкоманды linkbudget, stopdist, timing, simulate, sweep)
- Режим шлюза (FastAPI сервер настроек RSU)
"""

import argparse
import logging
import sys

# Загрузка переменных окружения из .env файла (опционально)
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # python-dotenv не установлен, используем только системные переменные
    pass

from utils.settings import get_gateway_host, get_log_level


class CliArgumentParser(argparse.ArgumentParser):
    """Парсер, завершающийся с кодом 1 при ошибке использования."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: ошибка: {message}\n")


def create_parser():
    """Создаёт парсер аргументов командной строки."""
    parser = CliArgumentParser(
        description='Electronic Speed Bump - симулятор RF «лежачего полицейского»',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Примеры использования:
  %(prog)s linkbudget --from 1 --to 400 --step 1      # Бюджет линии до 400 м
  %(prog)s stopdist --speed 120                       # Тормозной путь с 120 км/ч
  %(prog)s timing --speeds 80,100,120 --range 400     # Время подхода к RSU
  %(prog)s simulate scenarios/canonical.scn -o trace.csv
  %(prog)s sweep --param shadowing.sigma_db --values 0,2,4,6 --seeds 20
  %(prog)s gateway --port 8080                        # Запустить шлюз RSU
        """
    )
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    # linkbudget
    lb = subparsers.add_parser('linkbudget', help='Бюджет линии по расстоянию (CSV)')
    lb.add_argument('--from', dest='start', type=float, required=True, metavar='M',
                    help='Начальное расстояние, м (> 0)')
    lb.add_argument('--to', type=float, required=True, metavar='M', help='Конечное расстояние, м')
    lb.add_argument('--step', type=float, required=True, metavar='M', help='Шаг, м (> 0)')
    radio_group = lb.add_argument_group('Параметры радиолинии (по умолчанию: типовая линия RSU 2.4 ГГц)')
    for flag, dest, unit in (
        ('--tx-power', 'tx_power', 'дБм'),
        ('--tx-gain', 'tx_gain', 'дБи'),
        ('--tx-loss', 'tx_loss', 'дБ'),
        ('--misc-loss', 'misc_loss', 'дБ'),
        ('--rx-gain', 'rx_gain', 'дБи'),
        ('--rx-loss', 'rx_loss', 'дБ'),
        ('--sensitivity', 'sensitivity', 'дБм'),
        ('--frequency', 'frequency', 'Гц'),
    ):
        radio_group.add_argument(flag, dest=dest, type=float, default=None, help=unit)
    lb.add_argument('--sigma', type=float, default=None, metavar='DB',
                    help='Добавить столбец отсчёта RSSI с затенением σ, дБ')
    lb.add_argument('--seed', type=int, default=0, help='Зерно затенения (по умолчанию: 0)')
    lb.add_argument('--output', '-o', metavar='PATH', help='Записать CSV в файл')

    # stopdist
    sd = subparsers.add_parser('stopdist', help='Тормозной путь и профиль скорости')
    sd.add_argument('--speed', type=float, required=True, metavar='KMH', help='Начальная скорость, км/ч')
    sd.add_argument('--mu', type=float, default=0.7, help='Коэффициент трения (по умолчанию: 0.7)')
    sd.add_argument('--g', type=float, default=10.0, help='Ускорение свободного падения (по умолчанию: 10)')
    sd.add_argument('--step', type=float, default=1.0, metavar='M', help='Шаг профиля, м (по умолчанию: 1)')
    sd.add_argument('--output', '-o', metavar='PATH', help='Записать отчёт в файл')

    # timing
    tm = subparsers.add_parser('timing', help='Время от первого приёма сигнала до RSU')
    tm.add_argument('--speeds', default='80,100,120', metavar='LIST',
                    help='Скорости, км/ч, через запятую (по умолчанию: 80,100,120)')
    tm.add_argument('--range', type=float, default=400.0, metavar='M',
                    help='Расстояние до RSU, м (по умолчанию: 400)')
    tm.add_argument('--output', '-o', metavar='PATH', help='Записать CSV в файл')

    # simulate
    sim = subparsers.add_parser('simulate', help='Прогон сценария')
    sim.add_argument('scenario', nargs='?', default=None,
                     help='Файл сценария (по умолчанию: scenarios/canonical.scn)')
    sim.add_argument('--seed', type=int, default=None, help='Переопределить shadowing.seed')
    sim.add_argument('--output', '-o', metavar='PATH', help='Записать трассу CSV в файл')
    gateway_source = sim.add_mutually_exclusive_group()
    gateway_source.add_argument('--rsu-config', metavar='PATH',
                                help='Применить настройки RSU из JSON файла шлюза')
    gateway_source.add_argument('--rsu-url', metavar='URL',
                                help='Взять настройки RSU у работающего шлюза')

    # sweep
    sw = subparsers.add_parser('sweep', help='Перебор значений ключа сценария')
    sw.add_argument('--param', required=True, metavar='KEY', help='Ключ сценария')
    sw.add_argument('--values', required=True, metavar='LIST', help='Значения через запятую')
    sw.add_argument('--scenario', default=None, metavar='PATH', help='Базовый сценарий (по умолчанию: scenarios/canonical.scn)')
    sw.add_argument('--seeds', type=int, default=1, metavar='K',
                    help='Число зёрен на значение (по умолчанию: 1)')
    sw.add_argument('--seed', type=int, default=None, help='Первое зерно')
    sw.add_argument('--output', '-o', metavar='PATH', help='Записать CSV в файл')

    # gateway
    gw = subparsers.add_parser('gateway', help='Запустить локальный шлюз RSU')
    gw.add_argument('--host', default=None, help='Адрес (по умолчанию: GATEWAY_HOST или 127.0.0.1)')
    gw.add_argument('--port', '-p', type=int, default=8080, help='Порт (по умолчанию: 8080)')
    gw.add_argument('--config', default=None, metavar='PATH', help='Файл настроек RSU')

    return parser


def main(argv=None) -> int:
    """Главная точка входа."""
    logging.basicConfig(
        level=get_log_level(),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    parser = create_parser()
    args = parser.parse_args(argv)

    if args.command == 'gateway':
        from modes.gateway import run_gateway_server
        run_gateway_server(args.host or get_gateway_host(), args.port, args.config)
        return 0

    from modes.command import run_command_mode
    return run_command_mode(args)


if __name__ == '__main__':
    sys.exit(main())
